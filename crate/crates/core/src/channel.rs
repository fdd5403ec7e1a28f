//! A single Hoyt (Nakagami-q) faded hop and the distribution of its SNR.
//!
//! The channel gain is `h = X + iY` with independent zero-mean Gaussian
//! quadratures of variances `Ω/(1+q²)` and `q²Ω/(1+q²)`; the received SNR
//! `γ = |h|² P / N₀` has mean `γ̄ = Ω P / N₀`. `q = 1` is Rayleigh fading.
//!
//! The CDF is the Marcum-Q difference `Q₁(a, b) − Q₁(b, a)` with
//!
//! ```text
//! a = sqrt((1+q²) γ/γ̄) (1+q) / (2q),    b = sqrt((1+q²) γ/γ̄) (1−q) / (2q)
//! ```
//!
//! which is the argument pair whose derivative reproduces the density
//! (`(a²+b²)/2 = (1+q²)²γ/(4q²γ̄)` and `ab = (1−q⁴)γ/(4q²γ̄)`). The
//! `(1±q⁴)`-weighted pair that is sometimes quoted for this law does not
//! integrate the density and is not used.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::specfun::{bessel_i0_scaled, marcum_q1};

/// Complex channel gain of one hop.
pub type ComplexGain = Complex64;

/// One wireless hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoytLink {
    q: f64,
    omega: f64,
    power: f64,
    noise: f64,
    gamma_bar: f64,
}

impl HoytLink {
    pub fn new(q: f64, omega: f64, power: f64, noise: f64) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::domain(format!("fading parameter q={q} outside (0, 1]")));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::domain(format!("mean channel power {omega} must be positive")));
        }
        if !(power >= 0.0 && power.is_finite()) {
            return Err(Error::domain(format!("transmit power {power} must be >= 0")));
        }
        if !(noise > 0.0 && noise.is_finite()) {
            return Err(Error::domain(format!("noise variance {noise} must be positive")));
        }
        let gamma_bar = omega * power / noise;
        if !gamma_bar.is_finite() {
            return Err(Error::domain("mean SNR overflows"));
        }
        Ok(HoytLink {
            q,
            omega,
            power,
            noise,
            gamma_bar,
        })
    }

    /// Unit channel power and unit noise, so `γ̄` equals the transmit power.
    pub fn with_mean_snr(q: f64, gamma_bar: f64) -> Result<Self> {
        Self::new(q, 1.0, gamma_bar, 1.0)
    }

    /// Same as [`with_mean_snr`](Self::with_mean_snr) with the SNR in dB.
    pub fn with_mean_snr_db(q: f64, snr_db: f64) -> Result<Self> {
        Self::with_mean_snr(q, db_to_linear(snr_db))
    }

    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn power(&self) -> f64 {
        self.power
    }
    pub fn noise(&self) -> f64 {
        self.noise
    }
    pub fn gamma_bar(&self) -> f64 {
        self.gamma_bar
    }

    /// Copy of this link transmitting with a different power.
    pub fn with_power(&self, power: f64) -> Result<Self> {
        Self::new(self.q, self.omega, power, self.noise)
    }

    /// Copy of this link with a different fading parameter.
    pub fn with_q(&self, q: f64) -> Result<Self> {
        Self::new(q, self.omega, self.power, self.noise)
    }

    /// Density of the instantaneous SNR.
    pub fn pdf_snr(&self, gamma: f64) -> Result<f64> {
        check_gamma(gamma)?;
        if self.gamma_bar == 0.0 {
            return Err(Error::domain("SNR density undefined for a silent link"));
        }
        let q2 = self.q * self.q;
        let scale = 4.0 * q2 * self.gamma_bar;
        let decay = (1.0 + q2).powi(2) * gamma / scale;
        let bessel_arg = (1.0 - q2 * q2) * gamma / scale;
        let prefactor = (1.0 + q2) / (2.0 * self.q * self.gamma_bar);
        // exp(-decay) I0(arg) = exp(-(decay - arg)) * e^{-arg} I0(arg)
        Ok(prefactor * (bessel_arg - decay).exp() * bessel_i0_scaled(bessel_arg)?)
    }

    /// Marcum-Q arguments `(a, b)` of the CDF at `gamma`.
    pub fn cdf_arguments(&self, gamma: f64) -> (f64, f64) {
        let root = ((1.0 + self.q * self.q) * gamma / self.gamma_bar).sqrt() / (2.0 * self.q);
        (root * (1.0 + self.q), root * (1.0 - self.q))
    }

    /// Distribution function of the instantaneous SNR.
    pub fn cdf_snr(&self, gamma: f64) -> Result<f64> {
        check_gamma(gamma)?;
        if self.gamma_bar == 0.0 || gamma == 0.0 {
            return Ok(if self.gamma_bar == 0.0 { 1.0 } else { 0.0 });
        }
        let (a, b) = self.cdf_arguments(gamma);
        Ok((marcum_q1(a, b)? - marcum_q1(b, a)?).clamp(0.0, 1.0))
    }

    /// Moment generating function `E[e^{sγ}]`, defined for
    /// `s < (1+q²)/(2γ̄)`.
    pub fn mgf(&self, s: f64) -> Result<f64> {
        if !s.is_finite() {
            return Err(Error::domain(format!("mgf argument {s} not finite")));
        }
        let q2 = self.q * self.q;
        let x = 2.0 * s * self.gamma_bar;
        if x >= 1.0 + q2 {
            return Err(Error::domain(format!(
                "mgf undefined at s={s} (pole at {})",
                (1.0 + q2) / (2.0 * self.gamma_bar)
            )));
        }
        let radicand = 1.0 - x + x * x * q2 / (1.0 + q2).powi(2);
        Ok(radicand.sqrt().recip())
    }

    /// `mgf(-g / sin²θ)` in factored form.
    pub fn mgf_craig(&self, g: f64, theta: f64) -> Result<f64> {
        if !(theta > 0.0 && theta <= FRAC_PI_2) {
            return Err(Error::domain(format!("theta={theta} outside (0, π/2]")));
        }
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::domain(format!("g={g} must be positive")));
        }
        Ok(self.craig_factor(g, theta.sin().powi(2)))
    }

    /// Craig-form MGF factor at `sin²θ = s2`, without argument checks.
    pub(crate) fn craig_factor(&self, g: f64, s2: f64) -> f64 {
        let (c1, c2) = self.constants(g);
        ((1.0 + c1 / s2) * (1.0 + c2 / s2)).sqrt().recip()
    }

    /// `(2gγ̄/(1+q²), 2gq²γ̄/(1+q²))`.
    pub fn constants(&self, g: f64) -> (f64, f64) {
        let q2 = self.q * self.q;
        let first = 2.0 * g * self.gamma_bar / (1.0 + q2);
        (first, first * q2)
    }

    /// Standard deviations `(σ_x, σ_y)` of the in-phase and quadrature parts of `h`.
    pub fn quadrature_std(&self) -> (f64, f64) {
        let q2 = self.q * self.q;
        let var_x = self.omega / (1.0 + q2);
        (var_x.sqrt(), (var_x * q2).sqrt())
    }

    /// Draws one channel gain.
    pub fn sample_gain<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexGain {
        let (sx, sy) = self.quadrature_std();
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        Complex64::new(sx * x, sy * y)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma >= 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("SNR {gamma} must be finite and >= 0")))
    }
}
