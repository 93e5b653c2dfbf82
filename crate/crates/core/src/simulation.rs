//! Seeded competing-risks simulation with constant cause-specific hazards, and
//! Monte Carlo studies checking the large-sample behaviour of the estimators
//! and tests against closed-form truth.
//!
//! With hazards `λ_1, ..., λ_k` and `λ = Σ λ_j`, the lifetime is exponential
//! with rate `λ`, the cause is `j` with probability `λ_j / λ` independently of
//! the lifetime, and `F_j(t) = (λ_j / λ)(1 - e^{-λt})`. Nondecreasing hazards
//! give ordered CIFs; equal hazards give the null hypothesis.
//!
//! Replicate `r` of a study draws from ChaCha stream `r` of a generator seeded
//! from `(seed, n)`, so reports do not depend on thread scheduling.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::estimate_cifs;
use crate::hypothesis::ordered_test;
use crate::inference::{cov_uncensored, kernel, CovQuery, PluginCovariance};
use crate::isotonic::{restrict_cifs, windowed_maxmin};
use crate::normal::{null_cdf, null_quantile};
use crate::sample::Sample;
use crate::step::StepFunction;

/// Verdicts need at least this many replicates.
pub const MIN_REPLICATES_FOR_VERDICT: usize = 100;

const DECILES: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// One constant hazard per cause; `k` is the length.
    pub cause_hazards: Vec<f64>,
    /// Exponential censoring rate; 0 disables censoring.
    #[serde(default)]
    pub censor_rate: f64,
    pub n: usize,
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    /// Times for covariance checks in the fixed-t study.
    #[serde(default)]
    pub eval_times: Vec<f64>,
    /// Sample-size ladder for the consistency study.
    #[serde(default = "default_ladder")]
    pub sample_sizes: Vec<usize>,
    /// Cause examined by the dominance and fixed-t studies (1-based).
    #[serde(default = "default_cause")]
    pub cause: usize,
    /// Time examined by the dominance and fixed-t studies; defaults to the
    /// median lifetime `ln 2 / λ`.
    #[serde(default)]
    pub time: Option<f64>,
    #[serde(default = "default_u_grid")]
    pub u_grid: Vec<f64>,
    /// Multiplier of the Monte Carlo standard error for two-sided checks.
    #[serde(default = "default_tolerance_se")]
    pub tolerance_se: f64,
    /// Multiplier of the Monte Carlo standard error for the dominance check.
    #[serde(default = "default_dominance_se")]
    pub dominance_se: f64,
    /// Largest admissible Kolmogorov distance at the deciles of the null law.
    #[serde(default = "default_ks_tolerance")]
    pub ks_tolerance: f64,
    /// Number of Gaussian draws representing the limit law in the fixed-t study.
    #[serde(default = "default_gaussian_draws")]
    pub gaussian_draws: usize,
}

fn default_ladder() -> Vec<usize> {
    vec![100, 400, 1600]
}
fn default_cause() -> usize {
    1
}
fn default_u_grid() -> Vec<f64> {
    (1..=20).map(|i| i as f64 / 10.0).collect()
}
fn default_tolerance_se() -> f64 {
    3.0
}
fn default_dominance_se() -> f64 {
    2.0
}
fn default_ks_tolerance() -> f64 {
    0.05
}
fn default_gaussian_draws() -> usize {
    20_000
}

impl SimConfig {
    pub fn new(cause_hazards: Vec<f64>, censor_rate: f64, n: usize, replicates: usize, seed: u64) -> Self {
        Self {
            cause_hazards,
            censor_rate,
            n,
            replicates,
            seed,
            eval_times: Vec::new(),
            sample_sizes: default_ladder(),
            cause: default_cause(),
            time: None,
            u_grid: default_u_grid(),
            tolerance_se: default_tolerance_se(),
            dominance_se: default_dominance_se(),
            ks_tolerance: default_ks_tolerance(),
            gaussian_draws: default_gaussian_draws(),
        }
    }

    /// Censoring rate giving an expected censored fraction `frac`.
    pub fn censor_rate_for_fraction(cause_hazards: &[f64], frac: f64) -> f64 {
        let total: f64 = cause_hazards.iter().sum();
        total * frac / (1.0 - frac)
    }

    pub fn k(&self) -> usize {
        self.cause_hazards.len()
    }

    pub fn total_hazard(&self) -> f64 {
        self.cause_hazards.iter().sum()
    }

    pub fn median_lifetime(&self) -> f64 {
        std::f64::consts::LN_2 / self.total_hazard()
    }

    pub fn study_time(&self) -> f64 {
        self.time.unwrap_or_else(|| self.median_lifetime())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::BadConfig(m.to_string()));
        if self.k() < 2 {
            return bad("need at least two cause hazards");
        }
        if self.cause_hazards.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
            return bad("cause hazards must be finite and > 0");
        }
        if !(self.censor_rate.is_finite() && self.censor_rate >= 0.0) {
            return bad("censor_rate must be finite and >= 0");
        }
        if self.n == 0 || self.replicates == 0 {
            return bad("n and replicates must be positive");
        }
        if self.cause == 0 || self.cause > self.k() {
            return bad("cause outside 1..=k");
        }
        if let Some(t) = self.time {
            if !(t.is_finite() && t > 0.0) {
                return bad("time must be finite and > 0");
            }
        }
        if !(self.tolerance_se > 0.0 && self.dominance_se >= 0.0 && self.ks_tolerance > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.eval_times.iter().chain(&self.u_grid).any(|t| !(t.is_finite() && *t >= 0.0)) {
            return bad("eval_times and u_grid must be finite and >= 0");
        }
        Ok(())
    }

    pub fn is_null(&self) -> bool {
        self.cause_hazards.windows(2).all(|w| w[0] == w[1])
    }

    fn is_ordered(&self) -> bool {
        self.cause_hazards.windows(2).all(|w| w[0] <= w[1])
    }
}

fn rng_for(seed: u64, n: usize, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(replicate);
    rng
}

/// One sample of size `config.n`.
pub fn simulate_sample(config: &SimConfig, replicate_index: u64) -> Result<Sample> {
    simulate_sample_n(config, config.n, replicate_index)
}

/// One sample of size `n`, otherwise as [`simulate_sample`].
pub fn simulate_sample_n(config: &SimConfig, n: usize, replicate_index: u64) -> Result<Sample> {
    config.validate()?;
    if n == 0 {
        return Err(Error::BadConfig("n must be positive".into()));
    }
    let mut rng = rng_for(config.seed, n, replicate_index);
    let total = config.total_hazard();
    let lifetime = Exp::new(total).map_err(|e| Error::BadConfig(e.to_string()))?;
    let censoring = if config.censor_rate > 0.0 {
        Some(Exp::new(config.censor_rate).map_err(|e| Error::BadConfig(e.to_string()))?)
    } else {
        None
    };
    let mut records = Vec::with_capacity(n);
    for _ in 0..n {
        let t: f64 = lifetime.sample(&mut rng);
        let mut u: f64 = rng.random::<f64>() * total;
        let mut cause = config.k() as u32;
        for (j, &l) in config.cause_hazards.iter().enumerate() {
            if u < l {
                cause = j as u32 + 1;
                break;
            }
            u -= l;
        }
        let (time, cause) = match &censoring {
            Some(c) => {
                let c: f64 = c.sample(&mut rng);
                if c < t {
                    (c, 0)
                } else {
                    (t, cause)
                }
            }
            None => (t, cause),
        };
        records.push((time.max(f64::MIN_POSITIVE), cause));
    }
    Sample::new(&records, config.k())
}

/// `F_j(t) = (λ_j / λ)(1 - e^{-λt})`.
pub fn truth_cif(config: &SimConfig, j: usize, t: f64) -> f64 {
    let total = config.total_hazard();
    if t <= 0.0 {
        return 0.0;
    }
    -(config.cause_hazards[j - 1] / total) * (-total * t).exp_m1()
}

/// `(i_*, i^*)`: the 1-based range of causes whose true CIF equals `F_i` at
/// `t > 0`. Requires nondecreasing hazards, under which the set is contiguous.
pub fn tie_window(config: &SimConfig, i: usize) -> Result<(usize, usize)> {
    if !config.is_ordered() {
        return Err(Error::BadConfig("cause hazards must be nondecreasing".into()));
    }
    let h = &config.cause_hazards;
    let mut lo = i;
    while lo > 1 && h[lo - 2] == h[i - 1] {
        lo -= 1;
    }
    let mut hi = i;
    while hi < h.len() && h[hi] == h[i - 1] {
        hi += 1;
    }
    Ok((lo, hi))
}

/// Limiting covariance `Cov(Z_i(s), Z_j(t))` under the simulation truth; the
/// censored case integrates the kernel form numerically (composite Simpson).
pub fn truth_cov(config: &SimConfig, i: usize, j: usize, s: f64, t: f64) -> f64 {
    let (i, j, s, t) = if s <= t { (i, j, s, t) } else { (j, i, t, s) };
    if config.censor_rate == 0.0 {
        let fi = truth_cif(config, i, s);
        let fj = truth_cif(config, j, t);
        return cov_uncensored(fi, fj, i == j).expect("truth CIFs lie in [0, 1]");
    }
    truth_cov_quadrature(config, i, j, s, t)
}

/// Kernel-form covariance by quadrature; valid with or without censoring.
pub fn truth_cov_quadrature(config: &SimConfig, i: usize, j: usize, s: f64, t: f64) -> f64 {
    let k = config.k();
    let rate = config.total_hazard() + config.censor_rate;
    let fi_s = truth_cif(config, i, s);
    let fj_t = truth_cif(config, j, t);
    let integrand = |u: f64| {
        let f_u: Vec<f64> = (1..=k).map(|m| truth_cif(config, m, u)).collect();
        let inv_pi = (rate * u).exp();
        (0..k)
            .map(|l| {
                kernel(i - 1, l, &f_u, fi_s) * kernel(j - 1, l, &f_u, fj_t) * config.cause_hazards[l]
            })
            .sum::<f64>()
            * inv_pi
    };
    simpson(integrand, 0.0, s, 4000)
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let m = intervals + intervals % 2;
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for r in 1..m {
        let w = if r % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + r as f64 * h);
    }
    acc * h / 3.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McCheck {
    pub label: String,
    pub empirical: f64,
    pub theoretical: f64,
    pub mc_se: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McReport {
    pub study: String,
    pub replicates: usize,
    pub seed: u64,
    pub checks: Vec<McCheck>,
    pub metrics: BTreeMap<String, f64>,
    /// `None` when there are too few replicates for a verdict.
    pub passed: Option<bool>,
}

impl McReport {
    fn new(study: &str, config: &SimConfig, checks: Vec<McCheck>, metrics: BTreeMap<String, f64>) -> Self {
        let passed = (config.replicates >= MIN_REPLICATES_FOR_VERDICT)
            .then(|| checks.iter().all(|c| c.passed));
        Self { study: study.to_string(), replicates: config.replicates, seed: config.seed, checks, metrics, passed }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &McCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn std_error(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0).max(1.0);
    (var / xs.len() as f64).sqrt()
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len();
    if m % 2 == 1 {
        xs[m / 2]
    } else {
        0.5 * (xs[m / 2 - 1] + xs[m / 2])
    }
}

fn ecdf_at(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|&v| v <= x) as f64 / sorted.len() as f64
}

/// `sup_t |F̂(t) - F(t)|` for a step estimate of a continuous increasing truth
/// whose limit at infinity is `f_inf`. Checked at every knot from both sides.
pub fn sup_error<F: Fn(f64) -> f64>(estimate: &StepFunction, truth: F, f_inf: f64) -> f64 {
    let mut worst = (estimate.initial() - truth(0.0)).abs();
    for &u in estimate.knots() {
        let f = truth(u);
        worst = worst.max((estimate.eval(u) - f).abs()).max((estimate.left_limit(u) - f).abs());
    }
    worst.max((estimate.terminal() - f_inf).abs())
}

struct ConsistencyRep {
    restricted: f64,
    unrestricted: f64,
    contraction_holds: bool,
}

fn consistency_rep(config: &SimConfig, n: usize, r: u64) -> Result<ConsistencyRep> {
    let k = config.k();
    let sample = simulate_sample_n(config, n, r)?;
    let raw = estimate_cifs(&sample);
    let res = restrict_cifs(&raw)?;
    let total = config.total_hazard();
    let mut restricted: f64 = 0.0;
    let mut unrestricted: f64 = 0.0;
    for j in 1..=k {
        let inf = config.cause_hazards[j - 1] / total;
        restricted = restricted.max(sup_error(res.cif(j), |t| truth_cif(config, j, t), inf));
        unrestricted = unrestricted.max(sup_error(raw.cif(j), |t| truth_cif(config, j, t), inf));
    }
    let mut contraction_holds = true;
    for u in raw.grid() {
        for (a, b) in [(res.values_at(u), raw.values_at(u)), (left_values(&res, u), left_values(&raw, u))] {
            let mut lhs: f64 = 0.0;
            let mut rhs: f64 = 0.0;
            for j in 1..=k {
                let f = truth_cif(config, j, u);
                lhs = lhs.max((a[j - 1] - f).abs());
                rhs = rhs.max((b[j - 1] - f).abs());
            }
            contraction_holds &= lhs <= rhs;
        }
    }
    Ok(ConsistencyRep { restricted, unrestricted, contraction_holds })
}

fn left_values(set: &crate::cif::CifSet, t: f64) -> Vec<f64> {
    set.cifs().iter().map(|f| f.left_limit(t)).collect()
}

/// Median sup-norm error of the restricted estimates along the sample-size
/// ladder, plus the pointwise error contraction in every replicate.
pub fn mc_consistency(config: &SimConfig) -> Result<McReport> {
    config.validate()?;
    let ladder = &config.sample_sizes;
    if ladder.len() < 3 || ladder.windows(2).any(|w| w[0] >= w[1]) || ladder[0] == 0 {
        return Err(Error::BadConfig("need at least 3 strictly increasing sample sizes".into()));
    }
    let mut metrics = BTreeMap::new();
    let mut checks = Vec::new();
    let mut medians = Vec::new();
    let mut violations = 0usize;
    for &n in ladder {
        let reps = (0..config.replicates as u64)
            .into_par_iter()
            .map(|r| consistency_rep(config, n, r))
            .collect::<Result<Vec<_>>>()?;
        violations += reps.iter().filter(|r| !r.contraction_holds).count();
        let mut res: Vec<f64> = reps.iter().map(|r| r.restricted).collect();
        let mut raw: Vec<f64> = reps.iter().map(|r| r.unrestricted).collect();
        let m = median(&mut res);
        metrics.insert(format!("median_sup_error_restricted_n{n}"), m);
        metrics.insert(format!("median_sup_error_unrestricted_n{n}"), median(&mut raw));
        medians.push((n, m));
    }
    for w in medians.windows(2) {
        checks.push(McCheck {
            label: format!("median restricted sup error decreases n={} -> n={}", w[0].0, w[1].0),
            empirical: w[1].1,
            theoretical: w[0].1,
            mc_se: None,
            tolerance: 0.0,
            passed: w[1].1 < w[0].1,
        });
    }
    checks.push(McCheck {
        label: "pointwise error contraction in every replicate".into(),
        empirical: violations as f64,
        theoretical: 0.0,
        mc_se: None,
        tolerance: 0.0,
        passed: violations == 0,
    });
    Ok(McReport::new("consistency", config, checks, metrics))
}

/// Overall test statistics of `config.replicates` simulated samples.
pub fn null_statistics(config: &SimConfig) -> Result<Vec<f64>> {
    config.validate()?;
    (0..config.replicates as u64)
        .into_par_iter()
        .map(|r| Ok(ordered_test(&simulate_sample(config, r)?)?.statistic))
        .collect()
}

/// Empirical law of the test statistic under equal hazards against the limit
/// `(2Φ(t) - 1)^(k-1)`, compared at the deciles of the limit.
pub fn mc_null_distribution(config: &SimConfig) -> Result<McReport> {
    config.validate()?;
    if !config.is_null() {
        return Err(Error::NotNull);
    }
    let k = config.k();
    let mut stats = null_statistics(config)?;
    stats.sort_by(f64::total_cmp);
    let reps = stats.len() as f64;
    let mut checks = Vec::new();
    let mut decile_distance: f64 = 0.0;
    for q in DECILES {
        let x = null_quantile(q, k);
        let emp = ecdf_at(&stats, x);
        decile_distance = decile_distance.max((emp - q).abs());
        checks.push(McCheck {
            label: format!("P(T <= {x:.4}) at limit decile {q:.1}"),
            empirical: emp,
            theoretical: q,
            mc_se: Some((q * (1.0 - q) / reps).sqrt()),
            tolerance: config.ks_tolerance,
            passed: (emp - q).abs() <= config.ks_tolerance,
        });
    }
    let mut full: f64 = 0.0;
    for (m, &x) in stats.iter().enumerate() {
        let g = null_cdf(x, k);
        full = full.max((g - m as f64 / reps).abs()).max(((m + 1) as f64 / reps - g).abs());
    }
    let mut metrics = BTreeMap::new();
    metrics.insert("kolmogorov_distance_deciles".into(), decile_distance);
    metrics.insert("kolmogorov_distance_full".into(), full);
    metrics.insert("rejection_rate_5pct".into(), 1.0 - ecdf_at(&stats, null_quantile(0.95, k)));
    metrics.insert("censor_rate".into(), config.censor_rate);
    Ok(McReport::new("null", config, checks, metrics))
}

/// Per-replicate `(Z_in(t), Z*_in(t))` at the study time for the study cause.
pub fn fixed_t_draws(config: &SimConfig) -> Result<Vec<(f64, f64)>> {
    config.validate()?;
    let i = config.cause;
    let t = config.study_time();
    let truth = truth_cif(config, i, t);
    let root_n = (config.n as f64).sqrt();
    (0..config.replicates as u64)
        .into_par_iter()
        .map(|r| {
            let sample = simulate_sample(config, r)?;
            let raw = estimate_cifs(&sample);
            let res = restrict_cifs(&raw)?;
            Ok((root_n * (raw.cif(i).eval(t) - truth), root_n * (res.cif(i).eval(t) - truth)))
        })
        .collect()
}

/// Empirical `P(|Z| <= u)` and `P(|Z*| <= u)` curves with paired standard errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceCurves {
    pub u: Vec<f64>,
    pub unrestricted: Vec<f64>,
    pub restricted: Vec<f64>,
    /// Standard error of the paired difference at each `u`.
    pub diff_se: Vec<f64>,
    pub mse_unrestricted: f64,
    pub mse_restricted: f64,
}

pub fn dominance_curves(config: &SimConfig) -> Result<DominanceCurves> {
    let draws = fixed_t_draws(config)?;
    let mut out = DominanceCurves {
        u: config.u_grid.clone(),
        unrestricted: Vec::new(),
        restricted: Vec::new(),
        diff_se: Vec::new(),
        mse_unrestricted: mean(&draws.iter().map(|d| d.0 * d.0).collect::<Vec<_>>()),
        mse_restricted: mean(&draws.iter().map(|d| d.1 * d.1).collect::<Vec<_>>()),
    };
    for &u in &config.u_grid {
        let a: Vec<f64> = draws.iter().map(|d| (d.0.abs() <= u) as u8 as f64).collect();
        let b: Vec<f64> = draws.iter().map(|d| (d.1.abs() <= u) as u8 as f64).collect();
        let diff: Vec<f64> = b.iter().zip(&a).map(|(x, y)| x - y).collect();
        out.unrestricted.push(mean(&a));
        out.restricted.push(mean(&b));
        out.diff_se.push(std_error(&diff));
    }
    Ok(out)
}

/// `P(|Z*_i(t)| <= u) >= P(|Z_i(t)| <= u)` on the u-grid and a smaller second
/// moment, at a time where cause `i` is tied with at least one other cause.
pub fn mc_dominance(config: &SimConfig) -> Result<McReport> {
    config.validate()?;
    let i = config.cause;
    let t = config.study_time();
    let (lo, hi) = tie_window(config, i)?;
    if lo == hi {
        return Err(Error::TieSetSingleton { cause: i, time: t });
    }
    let fi = truth_cif(config, i, t);
    if !(fi > 0.0 && fi < 1.0) {
        return Err(Error::BadConfig(format!("F_{i}({t}) = {fi} not in (0, 1)")));
    }
    let curves = dominance_curves(config)?;
    let mut checks = Vec::new();
    for m in 0..curves.u.len() {
        let tol = config.dominance_se * curves.diff_se[m];
        checks.push(McCheck {
            label: format!("P(|Z*| <= {u}) >= P(|Z| <= {u}) - {s} se", u = curves.u[m], s = config.dominance_se),
            empirical: curves.restricted[m],
            theoretical: curves.unrestricted[m],
            mc_se: Some(curves.diff_se[m]),
            tolerance: tol,
            passed: curves.restricted[m] >= curves.unrestricted[m] - tol,
        });
    }
    checks.push(McCheck {
        label: "E[Z*^2] < E[Z^2]".into(),
        empirical: curves.mse_restricted,
        theoretical: curves.mse_unrestricted,
        mc_se: None,
        tolerance: 0.0,
        passed: curves.mse_restricted < curves.mse_unrestricted,
    });
    let mut metrics = BTreeMap::new();
    metrics.insert("time".into(), t);
    metrics.insert("truth_cif".into(), fi);
    metrics.insert("tie_set_size".into(), (hi - lo + 1) as f64);
    metrics.insert("mse_unrestricted".into(), curves.mse_unrestricted);
    metrics.insert("mse_restricted".into(), curves.mse_restricted);
    Ok(McReport::new("dominance", config, checks, metrics))
}

/// Draws from the fixed-t limit law of `Z*_i(t)`: Gaussian vectors with the
/// limiting covariance at `t`, passed through the max-min functional over the
/// tie window of cause `i`.
pub fn limit_law_draws(config: &SimConfig, draws: usize) -> Result<Vec<f64>> {
    let k = config.k();
    let i = config.cause;
    let t = config.study_time();
    let (lo, hi) = tie_window(config, i)?;
    let cov = DMatrix::from_fn(k, k, |r, c| truth_cov(config, r + 1, c + 1, t, t));
    let chol = cov
        .cholesky()
        .ok_or_else(|| Error::BadConfig("limit covariance is not positive definite".into()))?;
    let l = chol.l();
    let mut rng = rng_for(config.seed, config.n, u64::MAX);
    let mut out = Vec::with_capacity(draws);
    for _ in 0..draws {
        let e: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
        let z = &l * nalgebra::DVector::from_vec(e);
        let z: Vec<f64> = z.iter().copied().collect();
        let star = windowed_maxmin(&z, lo - 1, hi - 1);
        out.push(star[i - lo]);
    }
    Ok(out)
}

/// Monte Carlo covariances of `(Z_in(s), Z_jn(t))` against the limit: the
/// closed form without censoring, the replicate-averaged plug-in with it.
pub fn mc_covariance(config: &SimConfig, queries: &[CovQuery]) -> Result<Vec<McCheck>> {
    config.validate()?;
    let k = config.k();
    for q in queries {
        if q.i == 0 || q.j == 0 || q.i > k || q.j > k || !(q.s >= 0.0 && q.t >= 0.0) {
            return Err(Error::BadQuery(format!("{q:?}")));
        }
    }
    let root_n = (config.n as f64).sqrt();
    let censored = config.censor_rate > 0.0;
    // per replicate: (Z_i(s), Z_j(t), plug-in) for every query
    let reps: Vec<Vec<(f64, f64, f64)>> = (0..config.replicates as u64)
        .into_par_iter()
        .map(|r| {
            let sample = simulate_sample(config, r)?;
            let plugin = PluginCovariance::new(&sample);
            queries
                .iter()
                .map(|q| {
                    let zi = root_n * (plugin.cifs().cif(q.i).eval(q.s) - truth_cif(config, q.i, q.s));
                    let zj = root_n * (plugin.cifs().cif(q.j).eval(q.t) - truth_cif(config, q.j, q.t));
                    let pv = if censored {
                        let oq = if q.s <= q.t { *q } else { CovQuery { i: q.j, j: q.i, s: q.t, t: q.s } };
                        plugin.cov(oq)?
                    } else {
                        f64::NAN
                    };
                    Ok((zi, zj, pv))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut checks = Vec::new();
    for (m, q) in queries.iter().enumerate() {
        let zi: Vec<f64> = reps.iter().map(|r| r[m].0).collect();
        let zj: Vec<f64> = reps.iter().map(|r| r[m].1).collect();
        let (mi, mj) = (mean(&zi), mean(&zj));
        let prods: Vec<f64> = zi.iter().zip(&zj).map(|(a, b)| (a - mi) * (b - mj)).collect();
        let emp = prods.iter().sum::<f64>() / (prods.len() as f64 - 1.0).max(1.0);
        let mut se = std_error(&prods);
        let theory = if censored {
            let pv: Vec<f64> = reps.iter().map(|r| r[m].2).collect();
            let pse = std_error(&pv);
            se = (se * se + pse * pse).sqrt();
            mean(&pv)
        } else {
            truth_cov(config, q.i, q.j, q.s, q.t)
        };
        let tol = config.tolerance_se * se;
        checks.push(McCheck {
            label: format!("Cov(Z_{}({}), Z_{}({}))", q.i, q.s, q.j, q.t),
            empirical: emp,
            theoretical: theory,
            mc_se: Some(se),
            tolerance: tol,
            passed: (emp - theory).abs() <= tol,
        });
    }
    Ok(checks)
}

/// Law of `Z*_in(t)` from the data pipeline against draws from the max-min
/// limit functional, compared through the data CDF at the limit deciles; also
/// checks covariances on `eval_times` when given.
pub fn mc_fixed_t_limit(config: &SimConfig) -> Result<McReport> {
    config.validate()?;
    let t = config.study_time();
    let total_f: f64 = (1..=config.k()).map(|j| truth_cif(config, j, t)).sum();
    if !(total_f > 0.0 && total_f < 1.0) {
        return Err(Error::BadConfig(format!("F({t}) = {total_f} not in (0, 1)")));
    }
    if config.gaussian_draws < 2 {
        return Err(Error::BadConfig("gaussian_draws must be at least 2".into()));
    }
    let mut data: Vec<f64> = fixed_t_draws(config)?.into_iter().map(|d| d.1).collect();
    let mut limit = limit_law_draws(config, config.gaussian_draws)?;
    data.sort_by(f64::total_cmp);
    limit.sort_by(f64::total_cmp);
    let (r, m) = (data.len() as f64, limit.len() as f64);
    let mut checks = Vec::new();
    let mut metrics = BTreeMap::new();
    for q in DECILES {
        let x = limit[((q * m).ceil() as usize).clamp(1, limit.len()) - 1];
        let dx = data[((q * r).ceil() as usize).clamp(1, data.len()) - 1];
        metrics.insert(format!("decile_{q:.1}_limit"), x);
        metrics.insert(format!("decile_{q:.1}_data"), dx);
        let emp = ecdf_at(&data, x);
        let theo = ecdf_at(&limit, x);
        let se = (theo * (1.0 - theo) * (1.0 / r + 1.0 / m)).sqrt();
        let tol = config.tolerance_se * se;
        checks.push(McCheck {
            label: format!("P(Z* <= limit decile {q:.1})"),
            empirical: emp,
            theoretical: theo,
            mc_se: Some(se),
            tolerance: tol,
            passed: (emp - theo).abs() <= tol,
        });
    }
    let (lo, hi) = tie_window(config, config.cause)?;
    metrics.insert("time".into(), t);
    metrics.insert("tie_window_lo".into(), lo as f64);
    metrics.insert("tie_window_hi".into(), hi as f64);
    let mut queries = Vec::new();
    let other = if config.cause == config.k() { 1 } else { config.k() };
    for &s in &config.eval_times {
        for &u in &config.eval_times {
            queries.push(CovQuery { i: config.cause, j: config.cause, s, t: u });
            queries.push(CovQuery { i: config.cause, j: other, s, t: u });
        }
    }
    checks.extend(mc_covariance(config, &queries)?);
    Ok(McReport::new("fixed-t", config, checks, metrics))
}
