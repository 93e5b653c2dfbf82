//! Estimation and testing for the cumulative incidence functions of `k`
//! competing risks under the stochastic ordering `F_1 <= F_2 <= ... <= F_k`.
//!
//! The unrestricted estimates (empirical sub-distributions, or Kaplan–Meier /
//! Nelson–Aalen plug-ins under right censoring) are projected pointwise onto
//! the ordered cone by equal-weights isotonic regression. On top of that the
//! crate provides plug-in covariances and pointwise intervals, band
//! tightening, the ordered-alternative test with its asymptotic p-value, and
//! a seeded simulator for Monte Carlo checks of the large-sample theory.
//!
//! ```
//! use ordcif::{estimate_cifs, ordered_test, restrict_cifs, Sample};
//!
//! let sample = Sample::new(&[(1.0, 1), (2.0, 2), (3.0, 2), (4.0, 0)], 2).unwrap();
//! let raw = estimate_cifs(&sample);
//! let ordered = restrict_cifs(&raw).unwrap();
//! assert!(ordered.cif(1).eval(3.0) <= ordered.cif(2).eval(3.0));
//! let report = ordered_test(&sample).unwrap();
//! assert!((0.0..=1.0).contains(&report.p_value));
//! ```

pub mod cif;
pub mod error;
pub mod estimators;
pub mod hypothesis;
pub mod inference;
pub mod isotonic;
pub mod normal;
pub mod sample;
pub mod simulation;
pub mod step;

pub use cif::CifSet;
pub use error::{Error, Result};
pub use estimators::{
    censored_cif, censoring_km, ecdf_cif, estimate_cifs, kaplan_meier, nelson_aalen, CumHazard,
    SurvivalCurve,
};
pub use hypothesis::{ordered_test, subtest_statistic, SubTest, TestReport};
pub use inference::{
    cov_censored_plugin, cov_uncensored, pointwise_ci, tighten_bands, Band, CovQuery,
};
pub use isotonic::{isotonic_project, maxmin_reference, restrict_cifs};
pub use normal::{asymptotic_pvalue, std_normal_cdf};
pub use sample::{Cause, Observation, Sample};
pub use simulation::{McCheck, McReport, SimConfig};
pub use step::{stieltjes_integral, sup_diff, StepFunction};
