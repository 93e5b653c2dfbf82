use libm::erfc;
use statrs::function::erf::erfc_inv;

use crate::error::{Error, Result};

/// Standard normal distribution function, `Φ(x) = erfc(-x / √2) / 2`.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// `1 - Φ(x)` without cancellation in the upper tail.
pub fn std_normal_sf(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// `Φ⁻¹(p)` for `p` in `(0, 1)`: the `erfc⁻¹` estimate polished by one Newton
/// step against [`std_normal_cdf`].
pub fn std_normal_quantile(p: f64) -> f64 {
    let x = -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p);
    if !x.is_finite() {
        return x;
    }
    let density = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if density > 0.0 {
        x - (std_normal_cdf(x) - p) / density
    } else {
        x
    }
}

/// Limiting null survival function of the ordered-alternative statistic,
/// `P(T >= t) = 1 - (2Φ(t) - 1)^(k-1)`, and `1` for `t <= 0`.
///
/// Written as `-expm1((k-1) ln(1 - 2(1 - Φ(t))))` to keep tail accuracy.
pub fn asymptotic_pvalue(t: f64, k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::BadK(k));
    }
    if t.is_nan() || t <= 0.0 {
        return Ok(1.0);
    }
    let tail = 2.0 * std_normal_sf(t);
    Ok(-((k - 1) as f64 * (-tail).ln_1p()).exp_m1())
}

/// Distribution function of the limit statistic, `(2Φ(t) - 1)^(k-1)` on `t >= 0`.
pub fn null_cdf(t: f64, k: usize) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (2.0 * std_normal_cdf(t) - 1.0).powi(k as i32 - 1)
    }
}

/// Quantile of [`null_cdf`].
pub fn null_quantile(q: f64, k: usize) -> f64 {
    let base = q.powf(1.0 / (k as f64 - 1.0));
    std_normal_quantile(0.5 * (1.0 + base))
}
