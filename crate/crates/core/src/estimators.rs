//! Unrestricted CIF estimators.
//!
//! Without censoring the estimate of `F_j` is the empirical sub-distribution
//! `#{T_i <= t, δ_i = j} / n`. With censoring it is the plug-in
//! `∫_0^t Ŝ(u-) dΛ̂_j(u)` built from the Kaplan–Meier curve of the lifetime
//! and the cause-specific Nelson–Aalen hazard.

use serde::Serialize;

use crate::cif::CifSet;
use crate::error::{Error, Result};
use crate::sample::{Cause, Sample};
use crate::step::{cumulative_stieltjes, StepFunction};

/// Kaplan–Meier curves of the lifetime and of the censoring time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalCurve {
    pub survival: StepFunction,
    pub censoring: StepFunction,
}

/// Nelson–Aalen cumulative hazard of one cause.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CumHazard {
    pub cause: usize,
    pub hazard: StepFunction,
}

pub fn ecdf_cif(sample: &Sample, j: usize) -> Result<StepFunction> {
    if sample.is_censored() {
        return Err(Error::CensoringPresent);
    }
    sample.check_cause(j)?;
    let n = sample.n() as f64;
    let mut count = 0usize;
    let mut knots = Vec::new();
    let mut values = Vec::new();
    for row in sample.risk_table() {
        let d = row.counts[j];
        if d > 0 {
            count += d;
            knots.push(row.time);
            values.push(count as f64 / n);
        }
    }
    StepFunction::new(0.0, knots, values)
}

/// Empirical distribution function of all observed times.
pub fn ecdf_all(sample: &Sample) -> StepFunction {
    let n = sample.n() as f64;
    let mut seen = 0usize;
    let mut knots = Vec::new();
    let mut values = Vec::new();
    for row in sample.risk_table() {
        seen += row.counts.iter().sum::<usize>();
        knots.push(row.time);
        values.push(seen as f64 / n);
    }
    StepFunction::new(0.0, knots, values).expect("risk table times are strictly increasing")
}

/// Product-limit estimates for the lifetime and the censoring distribution.
///
/// At a tied time failures leave the risk set before censorings, so the
/// censoring curve uses `Y(u) - d(u)` subjects at risk.
pub fn kaplan_meier(sample: &Sample) -> SurvivalCurve {
    let mut s = 1.0;
    let mut sc = 1.0;
    let (mut sk, mut sv, mut ck, mut cv) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for row in sample.risk_table() {
        let y = row.at_risk as f64;
        let d = row.events();
        let c = row.censored();
        if d > 0 {
            s *= 1.0 - d as f64 / y;
            sk.push(row.time);
            sv.push(s);
        }
        if c > 0 {
            sc *= 1.0 - c as f64 / (y - d as f64);
            ck.push(row.time);
            cv.push(sc);
        }
    }
    SurvivalCurve {
        survival: StepFunction::new(1.0, sk, sv).expect("increasing knots"),
        censoring: StepFunction::new(1.0, ck, cv).expect("increasing knots"),
    }
}

pub fn censoring_km(sample: &Sample) -> StepFunction {
    kaplan_meier(sample).censoring
}

/// `Λ̂_j(t) = Σ_{u <= t} d_j(u) / Y(u)`.
pub fn nelson_aalen(sample: &Sample, j: usize) -> Result<CumHazard> {
    sample.check_cause(j)?;
    let mut acc = 0.0;
    let mut knots = Vec::new();
    let mut values = Vec::new();
    for row in sample.risk_table() {
        let d = row.counts[j];
        if d > 0 {
            acc += d as f64 / row.at_risk as f64;
            knots.push(row.time);
            values.push(acc);
        }
    }
    Ok(CumHazard { cause: j, hazard: StepFunction::new(0.0, knots, values)? })
}

/// All-cause Nelson–Aalen hazard.
pub fn nelson_aalen_all(sample: &Sample) -> StepFunction {
    let mut acc = 0.0;
    let mut knots = Vec::new();
    let mut values = Vec::new();
    for row in sample.risk_table() {
        let d = row.events();
        if d > 0 {
            acc += d as f64 / row.at_risk as f64;
            knots.push(row.time);
            values.push(acc);
        }
    }
    StepFunction::new(0.0, knots, values).expect("increasing knots")
}

/// `F̂_j(t) = ∫_0^t Ŝ(u-) dΛ̂_j(u)`.
pub fn censored_cif(sample: &Sample, j: usize) -> Result<StepFunction> {
    let hazard = nelson_aalen(sample, j)?;
    let km = kaplan_meier(sample);
    Ok(cumulative_stieltjes(&km.survival, &hazard.hazard))
}

/// Censored-pathway estimates for every cause, sharing one Kaplan–Meier curve.
pub fn censored_cifs(sample: &Sample) -> CifSet {
    let km = kaplan_meier(sample);
    let cifs = (1..=sample.k())
        .map(|j| {
            let hazard = nelson_aalen(sample, j).expect("cause index in range");
            cumulative_stieltjes(&km.survival, &hazard.hazard)
        })
        .collect();
    CifSet::unrestricted(cifs)
}

/// Unrestricted estimates: empirical when no observation is censored,
/// Kaplan–Meier plug-in for every cause otherwise.
pub fn estimate_cifs(sample: &Sample) -> CifSet {
    if sample.is_censored() {
        censored_cifs(sample)
    } else {
        let cifs = (1..=sample.k())
            .map(|j| ecdf_cif(sample, j).expect("uncensored sample, cause in range"))
            .collect();
        CifSet::unrestricted(cifs)
    }
}

/// Number of failures from cause `j`.
pub fn event_count(sample: &Sample, j: usize) -> usize {
    sample.count(Cause(j as u32))
}
