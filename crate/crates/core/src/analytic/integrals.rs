//! The MRC error integrals `I₁..I₄` in Lauricella closed form, and the
//! direct θ-quadrature they are checked against.
//!
//! Substituting `u = sin²θ` in `∫ Π_j (1 + A_j/sin²θ)^{-1/2} dθ` over `L` live
//! links (two constants `A_j` per link) gives a Beta-type integral, so that
//!
//! ```text
//! I₁ = √π Γ(L+½) / (2 Γ(L+1) √ΠA) · F_D(L+½; ½..½; L+1; −1/A_j)
//! I₂ = Γ(L+½) / (2^{L+3/2} Γ(L+3/2) √ΠA) · F_D(L+½; ½..½, ½; L+3/2; −1/(2A_j), ½)
//! ```
//!
//! `L` counts the direct link plus the forwarding relays only; a relay that
//! failed to decode contributes an MGF factor of one and no variables. A link
//! with zero mean SNR likewise drops out. Identical links merge into a single
//! pair of variables whose exponents are raised to `count/2`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use statrs::function::gamma::ln_gamma;

use super::{NetworkScenario, QamScheme, RelayState};
use crate::channel::HoytLink;
use crate::error::{Error, Result};
use crate::specfun::{integrate_finite, lauricella_fd, LauricellaArgs, QuadratureSpec};

/// Quadrature settings for the closed forms and the oracle. Purely relative,
/// because `F_D` becomes tiny (and its prefactor huge) at low SNR.
pub fn analytic_quadrature() -> QuadratureSpec {
    QuadratureSpec::relative(1e-11, 400).expect("valid constants")
}

/// `(2gγ̄/(1+q²), 2gq²γ̄/(1+q²))`
pub fn link_constants(link: &HoytLink, g: f64) -> (f64, f64) {
    link.constants(g)
}

/// A group of `count` identical links with constants `(a1, a2)`.
#[derive(Debug, Clone, Copy)]
struct LinkGroup {
    count: f64,
    a1: f64,
    a2: f64,
}

fn live(groups: &[LinkGroup]) -> impl Iterator<Item = &LinkGroup> {
    groups.iter().filter(|g| g.count > 0.0 && g.a1 > 0.0)
}

fn half_log_product(groups: &[LinkGroup]) -> f64 {
    live(groups).map(|g| 0.5 * g.count * (g.a1.ln() + g.a2.ln())).sum()
}

fn closed_i1(groups: &[LinkGroup]) -> Result<f64> {
    let l: f64 = live(groups).map(|g| g.count).sum();
    let a = l + 0.5;
    let c = l + 1.0;
    let (b, x): (Vec<f64>, Vec<f64>) = live(groups)
        .flat_map(|g| [(0.5 * g.count, -1.0 / g.a1), (0.5 * g.count, -1.0 / g.a2)])
        .unzip();
    let log_pref =
        0.5 * PI.ln() + ln_gamma(a) - 2f64.ln() - ln_gamma(c) - half_log_product(groups);
    let fd = lauricella_fd(&LauricellaArgs::new(a, b, c, x)?, &analytic_quadrature())
        .map_err(|e| e.rescaled("I1 closed form", log_pref.exp()))?;
    Ok(log_pref.exp() * fd)
}

fn closed_i2(groups: &[LinkGroup]) -> Result<f64> {
    let l: f64 = live(groups).map(|g| g.count).sum();
    let a = l + 0.5;
    let c = l + 1.5;
    let (mut b, mut x): (Vec<f64>, Vec<f64>) = live(groups)
        .flat_map(|g| {
            [
                (0.5 * g.count, -0.5 / g.a1),
                (0.5 * g.count, -0.5 / g.a2),
            ]
        })
        .unzip();
    b.push(0.5);
    x.push(0.5);
    let log_pref = ln_gamma(a) - (l + 1.5) * 2f64.ln() - ln_gamma(c) - half_log_product(groups);
    let fd = lauricella_fd(&LauricellaArgs::new(a, b, c, x)?, &analytic_quadrature())
        .map_err(|e| e.rescaled("I2 closed form", log_pref.exp()))?;
    Ok(log_pref.exp() * fd)
}

fn inid_groups(scenario: &NetworkScenario, state: &RelayState) -> Result<Vec<LinkGroup>> {
    scenario.check_state(state)?;
    let g = scenario.qam().g_qam();
    Ok(scenario
        .combined_links(state)
        .map(|l| {
            let (a1, a2) = l.constants(g);
            LinkGroup { count: 1.0, a1, a2 }
        })
        .collect())
}

fn iid_groups(scenario: &NetworkScenario, state: &RelayState) -> Result<Vec<LinkGroup>> {
    scenario.check_state(state)?;
    let g = scenario.qam().g_qam();
    let (a1, a2) = scenario.sd().constants(g);
    let mut groups = vec![LinkGroup { count: 1.0, a1, a2 }];
    let mut active = scenario
        .rd()
        .iter()
        .zip(state.bits())
        .filter(|(_, &on)| on)
        .map(|(l, _)| l);
    if let Some(first) = active.next() {
        let n = state.active_count();
        for other in active {
            if other.q() != first.q() || other.gamma_bar() != first.gamma_bar() {
                return Err(Error::domain(
                    "identical-link forms need every active relay→destination link to share q and mean SNR",
                ));
            }
        }
        let (b1, b2) = first.constants(g);
        groups.push(LinkGroup {
            count: n as f64,
            a1: b1,
            a2: b2,
        });
    }
    Ok(groups)
}

/// `I₁` for arbitrary (non-identical) links.
pub fn i1_closed(scenario: &NetworkScenario, state: &RelayState) -> Result<f64> {
    closed_i1(&inid_groups(scenario, state)?)
}

/// `I₂` for arbitrary (non-identical) links.
pub fn i2_closed(scenario: &NetworkScenario, state: &RelayState) -> Result<f64> {
    closed_i2(&inid_groups(scenario, state)?)
}

/// `I₁` when all forwarding relay→destination links are identical: the `2n`
/// relay variables collapse to two with exponent `n/2`.
pub fn i1_iid(scenario: &NetworkScenario, state: &RelayState) -> Result<f64> {
    closed_i1(&iid_groups(scenario, state)?)
}

/// `I₂` counterpart of [`i1_iid`].
pub fn i2_iid(scenario: &NetworkScenario, state: &RelayState) -> Result<f64> {
    closed_i2(&iid_groups(scenario, state)?)
}

/// `I₃ = π/(4√(C₁C₂)) F_D(3/2; ½, ½; 2; −1/C₁, −1/C₂)` for a single hop.
pub fn i3_closed(link: &HoytLink, qam: &QamScheme) -> Result<f64> {
    let (c1, c2) = link.constants(qam.g_qam());
    if c1 == 0.0 {
        return Ok(FRAC_PI_2);
    }
    let args = LauricellaArgs::new(1.5, vec![0.5, 0.5], 2.0, vec![-1.0 / c1, -1.0 / c2])?;
    let pref = PI / (4.0 * (c1 * c2).sqrt());
    let fd = lauricella_fd(&args, &analytic_quadrature()).map_err(|e| e.rescaled("I3", pref))?;
    Ok(pref * fd)
}

/// `I₄ = 1/(6√(2C₁C₂)) F_D(3/2; ½, ½, ½; 5/2; −1/(2C₁), −1/(2C₂), ½)`.
pub fn i4_closed(link: &HoytLink, qam: &QamScheme) -> Result<f64> {
    let (c1, c2) = link.constants(qam.g_qam());
    if c1 == 0.0 {
        return Ok(FRAC_PI_4);
    }
    let args = LauricellaArgs::new(
        1.5,
        vec![0.5, 0.5, 0.5],
        2.5,
        vec![-0.5 / c1, -0.5 / c2, 0.5],
    )?;
    let pref = 1.0 / (6.0 * (2.0 * c1 * c2).sqrt());
    let fd = lauricella_fd(&args, &analytic_quadrature()).map_err(|e| e.rescaled("I4", pref))?;
    Ok(pref * fd)
}

fn craig_pair(links: &[&HoytLink], g: f64) -> Result<(f64, f64)> {
    let integrand = |theta: f64| {
        let s2 = theta.sin().powi(2);
        links.iter().map(|l| l.craig_factor(g, s2)).product::<f64>()
    };
    let quad = analytic_quadrature();
    let i1 = integrate_finite(integrand, 0.0, FRAC_PI_2, &quad)?.value;
    let i2 = integrate_finite(integrand, 0.0, FRAC_PI_4, &quad)?.value;
    Ok((i1, i2))
}

/// `(I₁, I₂)` by adaptive θ-quadrature of the product of Craig-form MGFs.
pub fn ser_oracle_quadrature(scenario: &NetworkScenario, state: &RelayState) -> Result<(f64, f64)> {
    scenario.check_state(state)?;
    let links: Vec<_> = scenario.combined_links(state).collect();
    craig_pair(&links, scenario.qam().g_qam())
}

/// `(I₃, I₄)` of a single hop by θ-quadrature.
pub fn relay_oracle_quadrature(link: &HoytLink, qam: &QamScheme) -> Result<(f64, f64)> {
    craig_pair(&[link], qam.g_qam())
}

/// A way of evaluating the four error integrals.
pub trait ErrorIntegrals: Send + Sync {
    fn name(&self) -> &'static str;
    /// `(I₁, I₂)` at the destination for the given relay states.
    fn destination(&self, scenario: &NetworkScenario, state: &RelayState) -> Result<(f64, f64)>;
    /// `(I₃, I₄)` of one source→relay hop.
    fn relay(&self, link: &HoytLink, qam: &QamScheme) -> Result<(f64, f64)>;
}

/// Closed forms for non-identical links.
#[derive(Debug, Clone, Copy, Default)]
pub struct Lauricella;

impl ErrorIntegrals for Lauricella {
    fn name(&self) -> &'static str {
        "lauricella"
    }
    fn destination(&self, scenario: &NetworkScenario, state: &RelayState) -> Result<(f64, f64)> {
        let groups = inid_groups(scenario, state)?;
        Ok((closed_i1(&groups)?, closed_i2(&groups)?))
    }
    fn relay(&self, link: &HoytLink, qam: &QamScheme) -> Result<(f64, f64)> {
        Ok((i3_closed(link, qam)?, i4_closed(link, qam)?))
    }
}

/// Closed forms specialised to identical relay→destination links.
#[derive(Debug, Clone, Copy, Default)]
pub struct IidLauricella;

impl ErrorIntegrals for IidLauricella {
    fn name(&self) -> &'static str {
        "lauricella-iid"
    }
    fn destination(&self, scenario: &NetworkScenario, state: &RelayState) -> Result<(f64, f64)> {
        let groups = iid_groups(scenario, state)?;
        Ok((closed_i1(&groups)?, closed_i2(&groups)?))
    }
    fn relay(&self, link: &HoytLink, qam: &QamScheme) -> Result<(f64, f64)> {
        Ok((i3_closed(link, qam)?, i4_closed(link, qam)?))
    }
}

/// Direct θ-quadrature of the MGF product.
#[derive(Debug, Clone, Copy, Default)]
pub struct ThetaQuadrature;

impl ErrorIntegrals for ThetaQuadrature {
    fn name(&self) -> &'static str {
        "quadrature"
    }
    fn destination(&self, scenario: &NetworkScenario, state: &RelayState) -> Result<(f64, f64)> {
        ser_oracle_quadrature(scenario, state)
    }
    fn relay(&self, link: &HoytLink, qam: &QamScheme) -> Result<(f64, f64)> {
        relay_oracle_quadrature(link, qam)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{
        conditional_dest_error, relay_error_prob, total_ser, total_ser_with,
    };
    use crate::channel::db_to_linear;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn link(q: f64, db: f64) -> HoytLink {
        HoytLink::with_mean_snr_db(q, db).unwrap()
    }

    fn scenario(sd: HoytLink, sr: Vec<HoytLink>, rd: Vec<HoytLink>, m: u32) -> NetworkScenario {
        NetworkScenario::new(sd, sr, rd, QamScheme::new(m).unwrap()).unwrap()
    }

    #[test]
    fn constants_examples() {
        assert_eq!(link_constants(&HoytLink::with_mean_snr(1.0, 1.0).unwrap(), 0.5), (0.5, 0.5));
        let (a, b) = link_constants(&HoytLink::with_mean_snr(0.5, 10.0).unwrap(), 0.5);
        assert!((a - 8.0).abs() < 1e-14 && (b - 2.0).abs() < 1e-14);
        let (a, b) = link_constants(&HoytLink::with_mean_snr(0.3, 10.0).unwrap(), 0.1);
        assert!((a - 2.0 / 1.09).abs() < 1e-14 && (b - 0.18 / 1.09).abs() < 1e-14);
        assert!((a - 1.834_862).abs() < 1e-6 && (b - 0.165_138).abs() < 1e-6);
    }

    #[test]
    fn zero_snr_limits() {
        // Rayleigh: I1 = (π/2)(1 − μ), I2 = π/4 − μ atan(1/μ), μ = √(A/(1+A))
        let qam = QamScheme::new(4).unwrap();
        for &gb in &[1e-10, 1e-6, 1e-3] {
            let weak = HoytLink::with_mean_snr(1.0, gb).unwrap();
            let a = weak.constants(qam.g_qam()).0;
            let mu = (a / (1.0 + a)).sqrt();
            let (e1, e2) = (FRAC_PI_2 * (1.0 - mu), FRAC_PI_4 - mu * (1.0 / mu).atan());
            let s = scenario(weak, vec![], vec![], 4);
            let st = RelayState::new(vec![]);
            assert!(rel(i1_closed(&s, &st).unwrap(), e1) < 1e-9, "gb={gb}");
            assert!(rel(i2_closed(&s, &st).unwrap(), e2) < 1e-9, "gb={gb}");
            assert!(rel(i3_closed(&weak, &qam).unwrap(), e1) < 1e-9);
            assert!(rel(i4_closed(&weak, &qam).unwrap(), e2) < 1e-9);
        }
        // Hoyt with three live links at tiny SNR: both routes tend to the unit-integrand limit
        let weak = HoytLink::with_mean_snr(0.3, 1e-12).unwrap();
        let s = scenario(weak, vec![weak; 2], vec![weak; 2], 16);
        let st = RelayState::new(vec![true, true]);
        assert!(rel(i1_closed(&s, &st).unwrap(), FRAC_PI_2) < 1e-5);
        assert!(rel(i2_closed(&s, &st).unwrap(), FRAC_PI_4) < 1e-5);
        let silent = HoytLink::with_mean_snr(0.4, 0.0).unwrap();
        assert!((relay_error_prob(&silent, &qam).unwrap() - 0.75).abs() < 1e-15);
        let s = scenario(silent, vec![silent], vec![silent], 4);
        let p = conditional_dest_error(&s, &RelayState::new(vec![true])).unwrap();
        assert!((p - 0.75).abs() < 1e-12);
        let (o1, o2) = ser_oracle_quadrature(&s, &RelayState::new(vec![true])).unwrap();
        assert!(rel(o1, FRAC_PI_2) < 1e-12 && rel(o2, FRAC_PI_4) < 1e-12);
    }

    #[test]
    fn empty_state_reduces_to_single_hop() {
        for &(q, db, m) in &[(0.3, 0.0, 16), (0.5, 10.0, 4), (1.0, 20.0, 16)] {
            let sd = link(q, db);
            let r = link(0.7, 5.0);
            let s = scenario(sd, vec![r; 2], vec![r; 2], m);
            let st = RelayState::from_index(0, 2);
            let qam = QamScheme::new(m).unwrap();
            assert!(rel(i1_closed(&s, &st).unwrap(), i3_closed(&sd, &qam).unwrap()) < 1e-10);
            assert!(rel(i2_closed(&s, &st).unwrap(), i4_closed(&sd, &qam).unwrap()) < 1e-10);
            let direct = relay_error_prob(&sd, &qam).unwrap();
            assert!(rel(conditional_dest_error(&s, &st).unwrap(), direct) < 1e-10);
        }
    }

    #[test]
    fn rayleigh_single_hop() {
        // ∫₀^{π/2} (1 + 5/sin²θ)^{-1} dθ = (π/2)(1 − √(5/6))
        let l = HoytLink::with_mean_snr(1.0, 10.0).unwrap();
        let qam = QamScheme::new(4).unwrap();
        let expect = FRAC_PI_2 * (1.0 - (5.0f64 / 6.0).sqrt());
        assert!(rel(i3_closed(&l, &qam).unwrap(), expect) < 1e-10);
    }

    #[test]
    fn single_hop_matches_quadrature() {
        let l = HoytLink::with_mean_snr(0.5, 10.0).unwrap();
        let qam = QamScheme::new(16).unwrap();
        let (o3, o4) = relay_oracle_quadrature(&l, &qam).unwrap();
        assert!(rel(i3_closed(&l, &qam).unwrap(), o3) < 1e-8);
        assert!(rel(i4_closed(&l, &qam).unwrap(), o4) < 1e-8);
        assert!(0.0 < o4 && o4 < o3 && o3 <= FRAC_PI_2);
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let l = link(0.5, 10.0);
        let s = scenario(l, vec![l], vec![l], 4);
        let st = RelayState::new(vec![true]);
        let (o1, o2) = ser_oracle_quadrature(&s, &st).unwrap();
        assert!(rel(i1_closed(&s, &st).unwrap(), o1) < 1e-8);
        assert!(rel(i2_closed(&s, &st).unwrap(), o2) < 1e-8);

        let sd = link(0.5, 10.0);
        let rd = vec![link(0.3, 8.0), link(0.7, 12.0)];
        let s = scenario(sd, rd.clone(), rd, 4);
        let st = RelayState::new(vec![true, true]);
        let (o1, o2) = ser_oracle_quadrature(&s, &st).unwrap();
        let c1 = i1_closed(&s, &st).unwrap();
        let c2 = i2_closed(&s, &st).unwrap();
        assert!(rel(c1, o1) < 1e-8 && rel(c2, o2) < 1e-8);
        assert!(c2 < c1 && c1 <= FRAC_PI_2 && c2 <= FRAC_PI_4);
    }

    #[test]
    fn identical_link_forms() {
        let l = link(0.3, 15.0);
        let s = scenario(l, vec![l; 3], vec![l; 3], 4);
        for st in RelayState::all(3) {
            let (o1, o2) = ser_oracle_quadrature(&s, &st).unwrap();
            let (a1, a2) = (i1_iid(&s, &st).unwrap(), i2_iid(&s, &st).unwrap());
            assert!(rel(a1, i1_closed(&s, &st).unwrap()) < 1e-9);
            assert!(rel(a2, i2_closed(&s, &st).unwrap()) < 1e-9);
            assert!(rel(a1, o1) < 1e-8 && rel(a2, o2) < 1e-8);
        }
        let mixed = scenario(l, vec![l; 2], vec![l, link(0.5, 15.0)], 4);
        assert!(i1_iid(&mixed, &RelayState::new(vec![true, true])).is_err());
        // only active relays have to agree
        assert!(i1_iid(&mixed, &RelayState::new(vec![true, false])).is_ok());
    }

    #[test]
    fn conditional_error_matches_quadrature() {
        let l = link(0.3, 10.0);
        let s = scenario(l, vec![l; 2], vec![l; 2], 4);
        let st = RelayState::new(vec![true, true]);
        let (o1, o2) = ser_oracle_quadrature(&s, &st).unwrap();
        let oracle = s.qam().error_from_integrals(o1, o2);
        assert!(rel(conditional_dest_error(&s, &st).unwrap(), oracle) < 1e-8);
    }

    #[test]
    fn breakdown_invariants() {
        let sd = link(0.5, 5.0);
        let sr = vec![link(0.3, 0.0), link(0.9, 10.0), link(0.6, 3.0)];
        let rd = vec![link(0.7, 12.0), link(0.4, 2.0), link(1.0, 7.0)];
        let s = scenario(sd, sr, rd, 16);
        let b = total_ser(&s).unwrap();
        assert_eq!(b.states.len(), 8);
        let psum: f64 = b.states.iter().map(|t| t.probability).sum();
        assert!((psum - 1.0).abs() < 1e-12);
        let tsum: f64 = b.states.iter().map(|t| t.probability * t.conditional_error).sum();
        assert!((tsum - b.total).abs() < 1e-12);
        assert!(b.total > 0.0 && b.total < 1.0 - 1.0 / 16.0);
    }

    #[test]
    fn direct_and_single_relay_expansions() {
        let sd = link(0.6, 10.0);
        let qam = QamScheme::new(4).unwrap();
        let direct = total_ser(&scenario(sd, vec![], vec![], 4)).unwrap();
        assert!(rel(direct.total, relay_error_prob(&sd, &qam).unwrap()) < 1e-14);

        let sr = link(0.4, 12.0);
        let rd = link(0.8, 9.0);
        let s = scenario(sd, vec![sr], vec![rd], 4);
        let p1 = relay_error_prob(&sr, &qam).unwrap();
        let on = conditional_dest_error(&s, &RelayState::new(vec![true])).unwrap();
        let off = conditional_dest_error(&s, &RelayState::new(vec![false])).unwrap();
        let expect = (1.0 - p1) * on + p1 * off;
        assert!(rel(total_ser(&s).unwrap().total, expect) < 1e-14);
    }

    #[test]
    fn routes_agree_on_total() {
        let sd = link(0.3, 10.0);
        let rd = vec![link(0.5, 12.0), link(0.8, 6.0)];
        let sr = vec![link(1.0, 4.0), link(0.3, 15.0)];
        let s = scenario(sd, sr, rd, 16);
        let a = total_ser(&s).unwrap().total;
        let b = total_ser_with(&ThetaQuadrature, &s).unwrap().total;
        assert!(rel(a, b) < 1e-8);
    }

    #[test]
    fn monotone_in_snr_and_q() {
        for &m in &[4, 16] {
            let mut prev = 1.0;
            for db in (0..=30).step_by(3) {
                let v = total_ser(&NetworkScenario::symmetric(2, 0.5, db_to_linear(db as f64), m).unwrap())
                    .unwrap()
                    .total;
                assert!(v < prev, "m={m} db={db}");
                prev = v;
            }
            let mut prev = 1.0;
            for &q in &[0.2, 0.3, 0.5, 0.7, 0.9, 1.0] {
                let v = total_ser(&NetworkScenario::symmetric(2, q, 10.0, m).unwrap())
                    .unwrap()
                    .total;
                assert!(v <= prev, "m={m} q={q}");
                prev = v;
            }
        }
    }
}
