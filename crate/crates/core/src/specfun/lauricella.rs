//! Lauricella's fourth hypergeometric function `F_D` of `n` variables, evaluated
//! through its Euler-type integral
//!
//! ```text
//! F_D(a; b_1..b_n; c; x_1..x_n) =
//!     Γ(c) / (Γ(a) Γ(c-a)) ∫_0^1 t^{a-1} (1-t)^{c-a-1} Π_i (1 - x_i t)^{-b_i} dt
//! ```
//!
//! valid for `c > a > 0` and every `x_i < 1`.
//!
//! The interval is split at `t = 1/2`. On each half, an endpoint whose
//! exponent `α` is not a non-negative integer is removed by a power
//! substitution (`t = u^p` on the left, `1 - t = v^p` on the right), with
//! `p = 1/(1+α)` for `-1 < α < 0` (the Jacobian cancels the singularity
//! exactly) and `p = 2` for fractional `α > 0` (smooths the derivative).

use statrs::function::gamma::ln_gamma;

use super::quadrature::{integrate_finite, QuadratureSpec};
use crate::error::{Error, Result};

/// Parameters of one `F_D` evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct LauricellaArgs {
    a: f64,
    b: Vec<f64>,
    c: f64,
    x: Vec<f64>,
}

impl LauricellaArgs {
    pub fn new(a: f64, b: Vec<f64>, c: f64, x: Vec<f64>) -> Result<Self> {
        if !(a > 0.0 && c > a && c.is_finite()) {
            return Err(Error::domain(format!(
                "lauricella_fd requires c > a > 0 (got a={a}, c={c})"
            )));
        }
        if b.len() != x.len() {
            return Err(Error::domain(format!(
                "lauricella_fd: {} exponents but {} variables",
                b.len(),
                x.len()
            )));
        }
        if let Some(bad) = b.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("lauricella_fd: exponent {bad} not finite")));
        }
        if let Some(bad) = x.iter().find(|&&v| !(v < 1.0 && v.is_finite())) {
            return Err(Error::domain(format!(
                "lauricella_fd: variable {bad} must be finite and < 1"
            )));
        }
        Ok(LauricellaArgs { a, b, c, x })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn b(&self) -> &[f64] {
        &self.b
    }
    pub fn x(&self) -> &[f64] {
        &self.x
    }
    /// Number of variables `n`.
    pub fn len(&self) -> usize {
        self.x.len()
    }
    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `ln Π (1 - x_i t)^{-b_i}`
    fn log_kernel(&self, t: f64) -> f64 {
        self.b
            .iter()
            .zip(&self.x)
            .filter(|(&b, _)| b != 0.0)
            .map(|(&b, &x)| -b * (-x * t).ln_1p())
            .sum()
    }
}

fn substitution_power(alpha: f64) -> f64 {
    if alpha >= 0.0 && alpha.fract() == 0.0 {
        1.0
    } else if alpha < 0.0 {
        1.0 / (1.0 + alpha)
    } else {
        2.0
    }
}

/// Evaluates `F_D` to the tolerances of `quad` (applied to the integral before
/// the gamma-function normalisation; each half of the split interval gets
/// half the absolute budget).
pub fn lauricella_fd(args: &LauricellaArgs, quad: &QuadratureSpec) -> Result<f64> {
    quad.validate()?;
    let a = args.a;
    let c = args.c;
    let log_norm = ln_gamma(c) - ln_gamma(a) - ln_gamma(c - a);
    let norm = log_norm.exp();

    let alpha_left = a - 1.0;
    let alpha_right = c - a - 1.0;
    let p_left = substitution_power(alpha_left);
    let p_right = substitution_power(alpha_right);
    // exponents of u (resp. v) after the Jacobian is absorbed
    let e_left = p_left * (alpha_left + 1.0) - 1.0;
    let e_right = p_right * (alpha_right + 1.0) - 1.0;

    let half_quad = QuadratureSpec {
        absolute: quad.absolute * 0.5,
        ..*quad
    };

    let left = |u: f64| {
        let t = u.powf(p_left);
        let log = e_left * u.ln() + alpha_right * (-t).ln_1p() + args.log_kernel(t);
        p_left * log.exp()
    };
    let right = |v: f64| {
        let s = v.powf(p_right);
        let t = 1.0 - s;
        let log = e_right * v.ln() + alpha_left * (-s).ln_1p() + args.log_kernel(t);
        p_right * log.exp()
    };

    let left_hi = 0.5f64.powf(1.0 / p_left);
    let right_hi = 0.5f64.powf(1.0 / p_right);
    let l = integrate_finite(left, 0.0, left_hi, &half_quad);
    let r = integrate_finite(right, 0.0, right_hi, &half_quad);
    match (l, r) {
        (Ok(l), Ok(r)) => Ok(norm * (l.value + r.value)),
        (l, r) => {
            let (mut estimate, mut bound) = (0.0, 0.0);
            for part in [l, r] {
                match part {
                    Ok(i) => {
                        estimate += i.value;
                        bound += i.error_bound;
                    }
                    Err(Error::Numeric {
                        estimate: e,
                        error_bound: b,
                        ..
                    }) => {
                        estimate += e;
                        bound += b;
                    }
                    Err(other) => return Err(other),
                }
            }
            Err(Error::Numeric {
                context: "lauricella_fd".into(),
                estimate: norm * estimate,
                error_bound: norm * bound,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tight() -> QuadratureSpec {
        QuadratureSpec::new(1e-14, 1e-12, 200).unwrap()
    }

    /// Truncated Gauss series for 2F1(a, b; c; x), |x| < 1.
    fn hyp2f1_series(a: f64, b: f64, c: f64, x: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 0..20_000 {
            let k = k as f64;
            term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    }

    #[test]
    fn zero_arguments_give_one() {
        let args = LauricellaArgs::new(1.5, vec![0.5, 0.5], 2.0, vec![0.0, 0.0]).unwrap();
        let v = lauricella_fd(&args, &QuadratureSpec::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn logarithmic_reduction() {
        // 2F1(1,1;2;x) = -ln(1-x)/x
        let args = LauricellaArgs::new(1.0, vec![1.0], 2.0, vec![0.5]).unwrap();
        let v = lauricella_fd(&args, &QuadratureSpec::default()).unwrap();
        assert!((v - 2.0 * 2f64.ln()).abs() < 1e-10, "{v}");
        assert!((hyp2f1_series(1.0, 1.0, 2.0, 0.5) - 2.0 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn arcsine_reduction() {
        // 2F1(1/2,1/2;3/2;x) = asin(sqrt x)/sqrt x
        let args = LauricellaArgs::new(0.5, vec![0.5], 1.5, vec![0.5]).unwrap();
        let v = lauricella_fd(&args, &tight()).unwrap();
        let expect = 0.5f64.sqrt().asin() / 0.5f64.sqrt();
        assert!((v / expect - 1.0).abs() < 1e-11);
    }

    #[test]
    fn one_variable_matches_gauss_series() {
        let cases = [
            (1.5, 0.5, 2.0),
            (2.5, 0.5, 3.0),
            (3.5, 0.5, 4.5),
            (0.3, 1.7, 2.2),
            (1.5, 2.0, 2.5),
        ];
        for &(a, b, c) in &cases {
            for i in -9..=9 {
                let x = i as f64 * 0.1;
                let args = LauricellaArgs::new(a, vec![b], c, vec![x]).unwrap();
                let got = lauricella_fd(&args, &QuadratureSpec::default()).unwrap();
                let expect = hyp2f1_series(a, b, c, x);
                assert!(
                    (got / expect - 1.0).abs() < 1e-8,
                    "a={a} b={b} c={c} x={x}: {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn strongly_negative_arguments() {
        // 2F1(3/2,1/2;2;x) at large negative x via the transformation
        // 2F1(a,b;c;x) = (1-x)^{-b} 2F1(b, c-a; c; x/(x-1))
        for &x in &[-5.0, -60.0, -1e4] {
            let args = LauricellaArgs::new(1.5, vec![0.5], 2.0, vec![x]).unwrap();
            let got = lauricella_fd(&args, &tight()).unwrap();
            let z: f64 = x / (x - 1.0);
            let expect = (1.0 - x).powf(-0.5) * hyp2f1_series(0.5, 0.5, 2.0, z);
            // slowly converging series near z=1; compare loosely there
            let tol = if z > 0.99 { 1e-4 } else { 1e-9 };
            assert!((got / expect - 1.0).abs() < tol, "x={x}: {got} vs {expect}");
        }
    }

    #[test]
    fn invalid_arguments() {
        assert!(LauricellaArgs::new(2.0, vec![0.5], 1.5, vec![0.0]).is_err());
        assert!(LauricellaArgs::new(0.0, vec![0.5], 1.5, vec![0.0]).is_err());
        assert!(LauricellaArgs::new(1.0, vec![0.5], 2.0, vec![1.0]).is_err());
        assert!(LauricellaArgs::new(1.0, vec![0.5, 0.5], 2.0, vec![0.1]).is_err());
    }

    #[test]
    fn non_convergence_is_reported() {
        let args = LauricellaArgs::new(1.5, vec![0.5, 0.5], 2.0, vec![-1e6, -3.0]).unwrap();
        let quad = QuadratureSpec::new(1e-15, 1e-15, 1).unwrap();
        assert!(matches!(
            lauricella_fd(&args, &quad),
            Err(Error::Numeric { .. })
        ));
    }

    proptest! {
        #[test]
        fn all_zero_arguments_normalise(
            a in 0.1f64..6.0,
            gap in 0.1f64..4.0,
            b in prop::collection::vec(-2.0f64..2.0, 0..6),
        ) {
            let x = vec![0.0; b.len()];
            let args = LauricellaArgs::new(a, b, a + gap, x).unwrap();
            let v = lauricella_fd(&args, &QuadratureSpec::default()).unwrap();
            prop_assert!((v - 1.0).abs() < 1e-10, "{}", v);
        }

        #[test]
        fn permutation_invariant(
            pairs in prop::collection::vec((0.0f64..1.5, -20.0f64..0.9), 2..6),
            rot in 1usize..5,
        ) {
            let (b, x): (Vec<f64>, Vec<f64>) = pairs.iter().cloned().unzip();
            let args = LauricellaArgs::new(1.5, b.clone(), 2.0, x.clone()).unwrap();
            let mut bp = b; bp.rotate_left(rot % pairs.len());
            let mut xp = x; xp.rotate_left(rot % pairs.len());
            let permuted = LauricellaArgs::new(1.5, bp, 2.0, xp).unwrap();
            let q = QuadratureSpec::default();
            let v1 = lauricella_fd(&args, &q).unwrap();
            let v2 = lauricella_fd(&permuted, &q).unwrap();
            prop_assert!((v1 / v2 - 1.0).abs() < 1e-9);
        }

        #[test]
        fn zero_exponent_variable_is_inert(
            pairs in prop::collection::vec((0.0f64..1.0, -10.0f64..0.5), 1..4),
            extra in -50.0f64..0.99,
        ) {
            let (b, x): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let base = LauricellaArgs::new(2.5, b.clone(), 3.0, x.clone()).unwrap();
            let mut b2 = b; b2.push(0.0);
            let mut x2 = x; x2.push(extra);
            let ext = LauricellaArgs::new(2.5, b2, 3.0, x2).unwrap();
            let q = QuadratureSpec::default();
            prop_assert_eq!(lauricella_fd(&base, &q).unwrap(), lauricella_fd(&ext, &q).unwrap());
        }

        #[test]
        fn bounded_for_nonpositive_arguments(
            pairs in prop::collection::vec((0.0f64..1.0, -100.0f64..0.0), 1..7),
            n in 0u32..4,
        ) {
            let (b, x): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let a = 1.5 + n as f64;
            let args = LauricellaArgs::new(a, b, a + 0.5, x).unwrap();
            let v = lauricella_fd(&args, &QuadratureSpec::default()).unwrap();
            prop_assert!(v > 0.0 && v <= 1.0 + 1e-12);
        }
    }
}
