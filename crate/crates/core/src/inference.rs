//! Covariances of the limiting Gaussian processes, pointwise intervals for the
//! restricted estimates, and band tightening under the ordering.
//!
//! Under censoring, `Z_i(t) = Σ_l ∫_0^t h_il(u, t) dM_l(u) / Y(u) + o_p(1)` with
//!
//! ```text
//! h_ii(u, t) = 1 - F_i(t) - Σ_{m≠i} F_m(u)
//! h_il(u, t) = F_i(u) - F_i(t),             l ≠ i
//! ```
//!
//! so for `s <= t`, `Cov(Z_i(s), Z_j(t)) = Σ_l ∫_0^s h_il(u, s) h_jl(u, t) dΛ_l(u) / π(u)`.
//! The plug-in replaces `F`, `Λ` and `π` by `F̂(u-)`, `Λ̂` and `Y(u) / n`.

use serde::Serialize;

use crate::cif::CifSet;
use crate::error::{Error, Result};
use crate::estimators::estimate_cifs;
use crate::normal::std_normal_quantile;
use crate::sample::{RiskRow, Sample};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovQuery {
    pub i: usize,
    pub j: usize,
    pub s: f64,
    pub t: f64,
}

/// Pointwise lower and upper limits per cause on a time grid, indexed
/// `[cause - 1][time index]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Band {
    pub level: f64,
    pub times: Vec<f64>,
    pub lower: Vec<Vec<f64>>,
    pub upper: Vec<Vec<f64>>,
}

/// `Cov(Z_i(s), Z_j(t)) = F_i(s) (δ_ij - F_j(t))` for `s <= t`, uncensored case.
pub fn cov_uncensored(fi_s: f64, fj_t: f64, same_cause: bool) -> Result<f64> {
    for v in [fi_s, fj_t] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange(v));
        }
    }
    let delta = if same_cause { 1.0 } else { 0.0 };
    Ok(fi_s * (delta - fj_t))
}

/// `h_il(u, end)` given `F(u)` and `F_i(end)`.
pub fn kernel(i: usize, l: usize, f_u: &[f64], fi_end: f64) -> f64 {
    if l == i {
        let others: f64 = f_u.iter().enumerate().filter(|&(m, _)| m != i).map(|(_, v)| v).sum();
        1.0 - fi_end - others
    } else {
        f_u[i] - fi_end
    }
}

/// Pre-computed ingredients for repeated plug-in covariance queries on one sample.
#[derive(Debug, Clone)]
pub struct PluginCovariance {
    n: usize,
    cifs: CifSet,
    rows: Vec<RiskRow>,
}

impl PluginCovariance {
    pub fn new(sample: &Sample) -> Self {
        Self { n: sample.n(), cifs: estimate_cifs(sample), rows: sample.risk_table() }
    }

    pub fn cifs(&self) -> &CifSet {
        &self.cifs
    }

    /// Plug-in covariance; `i`, `j` are 1-based.
    pub fn cov(&self, query: CovQuery) -> Result<f64> {
        let k = self.cifs.k();
        let CovQuery { i, j, s, t } = query;
        if i == 0 || j == 0 || i > k || j > k {
            return Err(Error::BadQuery(format!("cause indices ({i}, {j}) outside 1..={k}")));
        }
        if !(s.is_finite() && t.is_finite() && 0.0 <= s && s <= t) {
            return Err(Error::BadQuery(format!("need 0 <= s <= t, got s = {s}, t = {t}")));
        }
        let (i0, j0) = (i - 1, j - 1);
        let fi_s = self.cifs.cif(i).eval(s);
        let fj_t = self.cifs.cif(j).eval(t);
        let mut f_u = vec![0.0; k];
        let mut acc = 0.0;
        for row in self.rows.iter().take_while(|r| r.time <= s) {
            if row.events() == 0 {
                continue;
            }
            if row.at_risk == 0 {
                return Err(Error::EmptyRiskSet(row.time));
            }
            let y = row.at_risk as f64;
            let pi = y / self.n as f64;
            for (m, f) in self.cifs.cifs().iter().enumerate() {
                f_u[m] = f.left_limit(row.time);
            }
            for l in 0..k {
                let d = row.counts[l + 1];
                if d == 0 {
                    continue;
                }
                let dlam = d as f64 / y;
                acc += kernel(i0, l, &f_u, fi_s) * kernel(j0, l, &f_u, fj_t) * dlam / pi;
            }
        }
        Ok(acc)
    }
}

/// Plug-in estimate of `Cov(Z_i(s), Z_j(t))` for the censored-data limit process.
pub fn cov_censored_plugin(sample: &Sample, query: CovQuery) -> Result<f64> {
    PluginCovariance::new(sample).cov(query)
}

/// Normal-approximation intervals `F̂*_i(t) ± z √(v̂_i(t) / n)` around the
/// restricted estimate, with the unrestricted plug-in variance, clipped to `[0, 1]`.
pub fn pointwise_ci(cifset: &CifSet, sample: &Sample, level: f64, times: &[f64]) -> Result<Band> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::BadLevel(level));
    }
    if !cifset.is_restricted() {
        return Err(Error::NotRestricted);
    }
    let z = std_normal_quantile(0.5 * (1.0 + level));
    let n = sample.n() as f64;
    let plugin = PluginCovariance::new(sample);
    let censored = sample.is_censored();
    let k = cifset.k();
    let mut lower = vec![Vec::with_capacity(times.len()); k];
    let mut upper = vec![Vec::with_capacity(times.len()); k];
    for &t in times {
        for i in 1..=k {
            let var = if censored {
                plugin.cov(CovQuery { i, j: i, s: t, t })?
            } else {
                let f = plugin.cifs().cif(i).eval(t).clamp(0.0, 1.0);
                cov_uncensored(f, f, true)?
            };
            let half = z * (var.max(0.0) / n).sqrt();
            let centre = cifset.cif(i).eval(t);
            lower[i - 1].push((centre - half).clamp(0.0, 1.0));
            upper[i - 1].push((centre + half).clamp(0.0, 1.0));
        }
    }
    Ok(Band { level, times: times.to_vec(), lower, upper })
}

/// `L*_i = max_{j <= i} L_j`, `U*_i = min_{j >= i} U_j` at every grid time.
pub fn tighten_bands(band: &Band) -> Band {
    let k = band.lower.len();
    let mut out = band.clone();
    for m in 0..band.times.len() {
        for i in 1..k {
            out.lower[i][m] = out.lower[i][m].max(out.lower[i - 1][m]);
        }
        for i in (0..k.saturating_sub(1)).rev() {
            out.upper[i][m] = out.upper[i][m].min(out.upper[i + 1][m]);
        }
    }
    out
}
