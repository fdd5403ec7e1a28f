//! First-order Marcum Q-function.

use super::bessel::{bessel_i0_scaled, bessel_i_ratios};
use crate::error::{Error, Result};

const TAIL_TOLERANCE: f64 = 1e-16;

/// `Q_1(a, b) = ∫_b^∞ x exp(-(x² + a²)/2) I_0(a x) dx`.
///
/// Evaluated with the Neumann series `exp(-(a²+b²)/2) Σ_k (a/b)^k I_k(ab)` when
/// `a < b`, and with the complementary series
/// `1 - exp(-(a²+b²)/2) Σ_{k≥1} (b/a)^k I_k(ab)` otherwise, so the summed
/// ratio never exceeds one. Summation stops once a geometric bound on the
/// remaining tail falls below 1e-16 of the partial sum.
pub fn marcum_q1(a: f64, b: f64) -> Result<f64> {
    if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::domain(format!(
            "marcum_q1 requires finite a, b >= 0 (got a={a}, b={b})"
        )));
    }
    if b == 0.0 {
        return Ok(1.0);
    }
    if a == 0.0 {
        return Ok((-0.5 * b * b).exp());
    }

    let x = a * b;
    // exp(-(a² + b²)/2) I_0(ab), written to avoid overflow
    let base = (-0.5 * (a - b).powi(2)).exp() * bessel_i0_scaled(x)?;
    let complementary = a >= b;
    let ratio = if complementary { b / a } else { a / b };

    if base == 0.0 {
        return Ok(if complementary { 1.0 } else { 0.0 });
    }

    let mut budget = 64 + (12.0 * x.sqrt()) as usize;
    loop {
        if let Some(sum) = neumann_sum(x, ratio, base, complementary, budget) {
            let q = if complementary { 1.0 - sum } else { sum };
            return Ok(q.clamp(0.0, 1.0));
        }
        budget *= 2;
    }
}

/// Sums `Σ ratio^k e^{-(a²+b²)/2} I_k(x)` from k=0 (or k=1 when
/// `skip_zero`). Returns `None` if `max_terms` ratios were not enough.
fn neumann_sum(x: f64, ratio: f64, base: f64, skip_zero: bool, max_terms: usize) -> Option<f64> {
    let rho = bessel_i_ratios(x, max_terms);
    let mut term = base;
    let mut sum = if skip_zero { 0.0 } else { base };
    for (k, &r_k) in rho.iter().enumerate().skip(1) {
        term *= ratio * r_k;
        sum += term;
        if term == 0.0 {
            return Some(sum);
        }
        if k + 1 < rho.len() {
            // I_k ratios decrease in k, so the tail is dominated by a geometric series.
            let q = ratio * rho[k + 1];
            if q < 1.0 && term * q / (1.0 - q) <= TAIL_TOLERANCE * sum {
                return Some(sum);
            }
        }
    }
    None
}
