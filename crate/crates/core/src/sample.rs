use serde::Serialize;

use crate::error::{Error, Result};

/// Cause of an observation: `0` is a censoring, `j >= 1` a failure from cause `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Cause(pub u32);

impl Cause {
    pub const CENSORED: Cause = Cause(0);

    pub fn is_censored(self) -> bool {
        self.0 == 0
    }

    pub fn code(self) -> u32 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Observation {
    pub time: f64,
    pub cause: Cause,
}

/// A validated competing-risks sample, sorted by time with failures ahead of
/// censorings at tied times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    k: usize,
    observations: Vec<Observation>,
}

/// Counts at one distinct observed time.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskRow {
    pub time: f64,
    /// Y(t): subjects with observed time >= t.
    pub at_risk: usize,
    /// `counts[0]` censorings, `counts[j]` failures from cause `j`.
    pub counts: Vec<usize>,
}

impl RiskRow {
    pub fn events(&self) -> usize {
        self.counts[1..].iter().sum()
    }

    pub fn censored(&self) -> usize {
        self.counts[0]
    }
}

impl Sample {
    pub fn new(records: &[(f64, u32)], k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::BadK(k));
        }
        if records.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut observations = Vec::with_capacity(records.len());
        for (index, &(time, code)) in records.iter().enumerate() {
            if !time.is_finite() || time <= 0.0 {
                return Err(Error::NonPositiveTime { index, time });
            }
            if code as usize > k {
                return Err(Error::CauseOutOfRange { index, code, k });
            }
            observations.push(Observation { time, cause: Cause(code) });
        }
        // failures (cause >= 1) sort ahead of censorings at equal times
        observations.sort_by(|a, b| {
            a.time
                .total_cmp(&b.time)
                .then_with(|| a.cause.is_censored().cmp(&b.cause.is_censored()))
                .then_with(|| a.cause.cmp(&b.cause))
        });
        Ok(Self { k, observations })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.observations.len()
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn records(&self) -> Vec<(f64, u32)> {
        self.observations.iter().map(|o| (o.time, o.cause.0)).collect()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.observations.iter().map(|o| o.time)
    }

    pub fn is_censored(&self) -> bool {
        self.observations.iter().any(|o| o.cause.is_censored())
    }

    /// Largest observed time.
    pub fn tau(&self) -> f64 {
        self.observations.last().map(|o| o.time).unwrap_or(0.0)
    }

    pub fn count(&self, cause: Cause) -> usize {
        self.observations.iter().filter(|o| o.cause == cause).count()
    }

    /// Number of subjects with observed time >= t.
    pub fn at_risk(&self, t: f64) -> usize {
        self.n() - self.observations.partition_point(|o| o.time < t)
    }

    pub(crate) fn check_cause(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.k {
            Err(Error::BadCauseIndex { j, k: self.k })
        } else {
            Ok(())
        }
    }

    /// One row per distinct observed time, in increasing order.
    pub fn risk_table(&self) -> Vec<RiskRow> {
        let mut rows: Vec<RiskRow> = Vec::new();
        let n = self.n();
        for (i, obs) in self.observations.iter().enumerate() {
            match rows.last_mut() {
                Some(row) if row.time == obs.time => row.counts[obs.cause.0 as usize] += 1,
                _ => {
                    let mut counts = vec![0; self.k + 1];
                    counts[obs.cause.0 as usize] += 1;
                    rows.push(RiskRow { time: obs.time, at_risk: n - i, counts });
                }
            }
        }
        rows
    }
}
