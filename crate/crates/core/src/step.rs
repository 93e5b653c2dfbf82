//! Right-continuous step functions.
//!
//! Every estimator in this crate (empirical CIFs, Kaplan–Meier curves,
//! Nelson–Aalen hazards, test-statistic processes) is piecewise constant with
//! finitely many jumps. `StepFunction` stores the value before the first knot
//! and the post-jump value at each knot, so evaluation is right-continuous and
//! left limits come for free from the previous knot.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepFunction {
    initial: f64,
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    /// Builds a step function; `values[m]` holds on `[knots[m], knots[m + 1])`.
    pub fn new(initial: f64, knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() != values.len() {
            return Err(Error::InvalidStepFunction(format!(
                "{} knots but {} values",
                knots.len(),
                values.len()
            )));
        }
        if knots.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidStepFunction("non-finite knot".into()));
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidStepFunction(
                "knots must be strictly increasing".into(),
            ));
        }
        Ok(Self { initial, knots, values })
    }

    pub fn constant(value: f64) -> Self {
        Self { initial: value, knots: Vec::new(), values: Vec::new() }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// Evaluates a function of several step functions on the union of their
    /// knots. The result is exact: between knots every input is constant.
    pub fn combine<F>(parts: &[&StepFunction], mut f: F) -> Self
    where
        F: FnMut(&[f64]) -> f64,
    {
        let knots = union_knots(parts);
        let mut buf: Vec<f64> = parts.iter().map(|p| p.initial).collect();
        let initial = f(&buf);
        let mut cursors = vec![0usize; parts.len()];
        let mut values = Vec::with_capacity(knots.len());
        for &t in &knots {
            for (slot, (part, cur)) in buf.iter_mut().zip(parts.iter().zip(cursors.iter_mut())) {
                while *cur < part.knots.len() && part.knots[*cur] <= t {
                    *cur += 1;
                }
                *slot = if *cur == 0 { part.initial } else { part.values[*cur - 1] };
            }
            values.push(f(&buf));
        }
        Self { initial, knots, values }
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    /// Value after the last knot.
    pub fn terminal(&self) -> f64 {
        self.values.last().copied().unwrap_or(self.initial)
    }

    /// Right-continuous evaluation.
    pub fn eval(&self, t: f64) -> f64 {
        let m = self.knots.partition_point(|&u| u <= t);
        if m == 0 {
            self.initial
        } else {
            self.values[m - 1]
        }
    }

    /// `lim_{s -> t-} f(s)`.
    pub fn left_limit(&self, t: f64) -> f64 {
        let m = self.knots.partition_point(|&u| u < t);
        if m == 0 {
            self.initial
        } else {
            self.values[m - 1]
        }
    }

    /// Iterator over `(knot, jump size)` pairs.
    pub fn jumps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.knots.iter().enumerate().map(move |(m, &t)| {
            let before = if m == 0 { self.initial } else { self.values[m - 1] };
            (t, self.values[m] - before)
        })
    }

    pub fn is_nondecreasing(&self) -> bool {
        let mut prev = self.initial;
        for &v in &self.values {
            if v < prev {
                return false;
            }
            prev = v;
        }
        true
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            initial: self.initial * factor,
            knots: self.knots.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

/// Sorted, deduplicated union of the knot sets.
pub fn union_knots(parts: &[&StepFunction]) -> Vec<f64> {
    let mut all: Vec<f64> = parts.iter().flat_map(|p| p.knots.iter().copied()).collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}

/// Exact supremum of `f - g` over `[0, upper]` and the earliest time it is
/// attained. Candidates are `t = 0` and every knot of either function in
/// `(0, upper]`; left limits at a knot equal the value at the previous
/// candidate, so they are covered too.
pub fn sup_diff(f: &StepFunction, g: &StepFunction, upper: f64) -> (f64, f64) {
    let mut best = (f.eval(0.0) - g.eval(0.0), 0.0);
    if upper <= 0.0 {
        return best;
    }
    for t in union_knots(&[f, g]) {
        if t <= 0.0 {
            continue;
        }
        if t > upper {
            break;
        }
        let d = f.eval(t) - g.eval(t);
        if d > best.0 {
            best = (d, t);
        }
    }
    best
}

/// `∫_(0, t] g(u-) dF(u)`: the sum of `g(u-) * ΔF(u)` over jumps `u <= t`.
pub fn stieltjes_integral(integrand: &StepFunction, integrator: &StepFunction, t: f64) -> f64 {
    integrator
        .jumps()
        .take_while(|&(u, _)| u <= t)
        .map(|(u, jump)| integrand.left_limit(u) * jump)
        .sum()
}

/// The whole path `t -> ∫_(0, t] g(u-) dF(u)` as a step function with the
/// integrator's knots. Starts at 0.
pub fn cumulative_stieltjes(integrand: &StepFunction, integrator: &StepFunction) -> StepFunction {
    let mut acc = 0.0;
    let mut knots = Vec::with_capacity(integrator.len());
    let mut values = Vec::with_capacity(integrator.len());
    for (u, jump) in integrator.jumps() {
        acc += integrand.left_limit(u) * jump;
        knots.push(u);
        values.push(acc);
    }
    StepFunction { initial: 0.0, knots, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn half_at(t: f64) -> StepFunction {
        StepFunction::new(0.0, vec![t], vec![0.5]).unwrap()
    }

    #[test]
    fn right_continuous_eval_and_left_limit() {
        let f = half_at(1.0);
        assert_eq!(f.eval(1.0), 0.5);
        assert_eq!(f.left_limit(1.0), 0.0);
        assert_eq!(f.eval(0.99), 0.0);
        assert_eq!(f.left_limit(1.5), 0.5);
    }

    #[test]
    fn rejects_malformed() {
        assert!(StepFunction::new(0.0, vec![1.0, 1.0], vec![0.1, 0.2]).is_err());
        assert!(StepFunction::new(0.0, vec![2.0, 1.0], vec![0.1, 0.2]).is_err());
        assert!(StepFunction::new(0.0, vec![1.0], vec![]).is_err());
        assert!(StepFunction::new(0.0, vec![f64::NAN], vec![0.0]).is_err());
    }

    #[test]
    fn sup_diff_cases() {
        let f = half_at(1.0);
        assert_eq!(sup_diff(&f, &f, 3.0), (0.0, 0.0));
        let g = half_at(2.0);
        assert_eq!(sup_diff(&f, &g, 3.0), (0.5, 1.0));
        assert_eq!(sup_diff(&f, &g, 0.5), (0.0, 0.0));
    }

    #[test]
    fn stieltjes_cases() {
        let one = StepFunction::constant(1.0);
        let unit = StepFunction::new(0.0, vec![1.0], vec![1.0]).unwrap();
        assert_eq!(stieltjes_integral(&one, &unit, 2.0), 1.0);
        assert_eq!(stieltjes_integral(&one, &unit, 0.5), 0.0);
        // integrand drops to 2/3 at u = 1; at u = 3 the left limit is 2/3
        let g = StepFunction::new(1.0, vec![1.0], vec![2.0 / 3.0]).unwrap();
        let jump3 = StepFunction::new(0.0, vec![3.0], vec![1.0]).unwrap();
        assert_eq!(stieltjes_integral(&g, &jump3, 3.0), 2.0 / 3.0);
    }

    #[test]
    fn combine_sums_on_union_grid() {
        let s = StepFunction::combine(&[&half_at(1.0), &half_at(2.0)], |v| v.iter().sum());
        assert_eq!(s.knots(), &[1.0, 2.0]);
        assert_eq!(s.values(), &[0.5, 1.0]);
    }

    fn arb_step() -> impl Strategy<Value = StepFunction> {
        (
            -1.0f64..1.0,
            prop::collection::btree_set(1u32..10_000, 0..30),
            prop::collection::vec(-1.0f64..1.0, 30),
        )
            .prop_map(|(init, ks, vs)| {
                let knots: Vec<f64> = ks.into_iter().map(|k| k as f64 / 100.0).collect();
                let values = vs[..knots.len()].to_vec();
                StepFunction::new(init, knots, values).unwrap()
            })
    }

    proptest! {
        #[test]
        fn eval_reproduces_stored_values(f in arb_step()) {
            for (t, v) in f.knots().iter().zip(f.values()) {
                prop_assert_eq!(f.eval(*t), *v);
            }
        }

        #[test]
        fn unit_integrand_gives_increment(f in arb_step(), t in 0.0f64..120.0) {
            let one = StepFunction::constant(1.0);
            let lhs = stieltjes_integral(&one, &f, t);
            prop_assert!((lhs - (f.eval(t) - f.eval(0.0))).abs() < 1e-12);
        }

        #[test]
        fn stieltjes_is_additive(f in arb_step(), g in arb_step(), a in 0.0f64..120.0, b in 0.0f64..120.0) {
            let (t1, t2) = if a <= b { (a, b) } else { (b, a) };
            let between: f64 = f.jumps()
                .filter(|&(u, _)| u > t1 && u <= t2)
                .map(|(u, d)| g.left_limit(u) * d)
                .sum();
            let lhs = stieltjes_integral(&g, &f, t2);
            let rhs = stieltjes_integral(&g, &f, t1) + between;
            prop_assert!((lhs - rhs).abs() < 1e-12);
            let path = cumulative_stieltjes(&g, &f);
            prop_assert!((path.eval(t2) - lhs).abs() < 1e-12);
        }

        #[test]
        fn sup_matches_negated_inf(f in arb_step(), g in arb_step(), upper in 0.0f64..120.0) {
            let (sup, arg) = sup_diff(&f, &g, upper);
            let mut grid = vec![0.0];
            grid.extend(union_knots(&[&f, &g]).into_iter().filter(|&t| t > 0.0 && t <= upper));
            let inf = grid.iter().map(|&t| g.eval(t) - f.eval(t)).fold(f64::INFINITY, f64::min);
            prop_assert_eq!(sup, -inf);
            prop_assert_eq!(f.eval(arg) - g.eval(arg), sup);
            // midpoints never beat the knot scan
            for w in grid.windows(2) {
                let mid = 0.5 * (w[0] + w[1]);
                prop_assert!(f.eval(mid) - g.eval(mid) <= sup);
            }
        }
    }
}
