use serde::Serialize;

use crate::step::StepFunction;

/// The `k` cumulative incidence estimates together with their sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CifSet {
    k: usize,
    cifs: Vec<StepFunction>,
    total: StepFunction,
    restricted: bool,
}

impl CifSet {
    /// Unrestricted set; the total is the pointwise sum on the union grid.
    pub fn unrestricted(cifs: Vec<StepFunction>) -> Self {
        let parts: Vec<&StepFunction> = cifs.iter().collect();
        let total = StepFunction::combine(&parts, |v| v.iter().sum());
        Self { k: cifs.len(), cifs, total, restricted: false }
    }

    pub(crate) fn restricted_from(cifs: Vec<StepFunction>, total: StepFunction) -> Self {
        Self { k: cifs.len(), cifs, total, restricted: true }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Estimate for cause `j`, 1-based.
    pub fn cif(&self, j: usize) -> &StepFunction {
        &self.cifs[j - 1]
    }

    pub fn cifs(&self) -> &[StepFunction] {
        &self.cifs
    }

    pub fn total(&self) -> &StepFunction {
        &self.total
    }

    pub fn is_restricted(&self) -> bool {
        self.restricted
    }

    /// `(F_1(t), ..., F_k(t))`.
    pub fn values_at(&self, t: f64) -> Vec<f64> {
        self.cifs.iter().map(|f| f.eval(t)).collect()
    }

    /// Union of the knot sets of all `k` estimates.
    pub fn grid(&self) -> Vec<f64> {
        let parts: Vec<&StepFunction> = self.cifs.iter().collect();
        crate::step::union_knots(&parts)
    }
}
