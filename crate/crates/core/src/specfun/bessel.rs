//! Modified Bessel function of the first kind, order zero.

use crate::error::{Error, Result};

// Above this the asymptotic expansion is accurate to machine precision.
const SERIES_LIMIT: f64 = 30.0;

/// `I_0(x)`. Even in `x`; overflows to `+inf` beyond `|x| ≈ 713`.
pub fn bessel_i0(x: f64) -> Result<f64> {
    let ax = check(x)?;
    if ax <= SERIES_LIMIT {
        Ok(power_series(ax))
    } else {
        Ok(asymptotic_scaled(ax) * ax.exp())
    }
}

/// Exponentially scaled `e^{-|x|} I_0(x)`, finite for every finite `x`.
pub fn bessel_i0_scaled(x: f64) -> Result<f64> {
    let ax = check(x)?;
    if ax <= SERIES_LIMIT {
        Ok(power_series(ax) * (-ax).exp())
    } else {
        Ok(asymptotic_scaled(ax))
    }
}

fn check(x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x.abs())
    } else {
        Err(Error::domain(format!("bessel_i0 argument {x} is not finite")))
    }
}

fn power_series(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > f64::EPSILON * 1e-2 * sum {
        term *= y / (k * k);
        sum += term;
        k += 1.0;
    }
    sum
}

fn asymptotic_scaled(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0f64;
    loop {
        let next = term * (2.0 * k - 1.0).powi(2) / (8.0 * k * x);
        if next >= term || next < f64::EPSILON * 1e-2 * sum {
            break;
        }
        sum += next;
        term = next;
        k += 1.0;
    }
    sum / (2.0 * std::f64::consts::PI * x).sqrt()
}

/// Ratios `I_k(x) / I_{k-1}(x)` for `k = 1..=n`, by backward recurrence of the
/// continued fraction `r_k = 1 / (2k/x + r_{k+1})` started far enough above `n`.
pub(crate) fn bessel_i_ratios(x: f64, n: usize) -> Vec<f64> {
    debug_assert!(x > 0.0);
    let start = n + 32 + (4.0 * x.sqrt()) as usize + (x.min(1e4)) as usize / 4;
    let mut ratios = vec![0.0; n + 1];
    let mut r = 0.0;
    for k in (1..=start).rev() {
        r = 1.0 / (2.0 * k as f64 / x + r);
        if k <= n {
            ratios[k] = r;
        }
    }
    ratios
}
