//! Exact average SER of a K-relay decode-and-forward network.
//!
//! The destination error probability is averaged over all `2^K` relay
//! decoding outcomes. For each outcome the MRC output SNR has an MGF equal to
//! the product of the source→destination MGF and those of the relays that
//! decoded correctly; the square-QAM error probability is then
//!
//! ```text
//! P(e) = (4C/π) I₁ − (4C²/π) I₂,   I₁ = ∫₀^{π/2} M(−g/sin²θ) dθ,   I₂ = ∫₀^{π/4} (same)
//! ```
//!
//! with `C = 1 − 1/√M`, `g = 3/(2(M−1))`. The integrals are closed with
//! Lauricella `F_D` (see [`integrals`]) or evaluated by direct quadrature.

pub mod integrals;

use rayon::prelude::*;

use crate::channel::HoytLink;
use crate::error::{Error, Result};

pub use integrals::{
    i1_closed, i1_iid, i2_closed, i2_iid, i3_closed, i4_closed, link_constants,
    relay_oracle_quadrature, ser_oracle_quadrature, ErrorIntegrals, IidLauricella, Lauricella,
    ThetaQuadrature,
};

/// Largest relay count for exhaustive state enumeration.
pub const MAX_RELAYS: usize = 20;

/// Square M-QAM constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QamScheme {
    m: u32,
    c_const: f64,
    g_qam: f64,
}

impl QamScheme {
    pub fn new(m: u32) -> Result<Self> {
        let side = (m as f64).sqrt().round() as u32;
        if m < 4 || side * side != m {
            return Err(Error::domain(format!(
                "modulation order {m} is not a perfect square >= 4"
            )));
        }
        Ok(QamScheme {
            m,
            c_const: 1.0 - 1.0 / side as f64,
            g_qam: 3.0 / (2.0 * (m as f64 - 1.0)),
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }
    /// Points per axis, `√M`.
    pub fn side(&self) -> u32 {
        (self.m as f64).sqrt().round() as u32
    }
    /// `C = 1 − 1/√M`
    pub fn c_const(&self) -> f64 {
        self.c_const
    }
    /// `g = 3 / (2(M − 1))`
    pub fn g_qam(&self) -> f64 {
        self.g_qam
    }

    /// `(4C/π) I₁ − (4C²/π) I₂`
    pub fn error_from_integrals(&self, i1: f64, i2: f64) -> f64 {
        let c = self.c_const;
        4.0 * c / std::f64::consts::PI * i1 - 4.0 * c * c / std::f64::consts::PI * i2
    }

    /// Error probability with no signal, `1 − 1/M`.
    pub fn error_floor(&self) -> f64 {
        1.0 - 1.0 / self.m as f64
    }
}

pub fn qam_scheme(m: u32) -> Result<QamScheme> {
    QamScheme::new(m)
}

/// Source→destination link plus `K` (source→relay, relay→destination) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkScenario {
    sd: HoytLink,
    sr: Vec<HoytLink>,
    rd: Vec<HoytLink>,
    qam: QamScheme,
}

impl NetworkScenario {
    pub fn new(sd: HoytLink, sr: Vec<HoytLink>, rd: Vec<HoytLink>, qam: QamScheme) -> Result<Self> {
        if sr.len() != rd.len() {
            return Err(Error::domain(format!(
                "{} source-relay links but {} relay-destination links",
                sr.len(),
                rd.len()
            )));
        }
        Ok(NetworkScenario { sd, sr, rd, qam })
    }

    /// Every hop shares `q` and mean SNR.
    pub fn symmetric(k: usize, q: f64, gamma_bar: f64, m: u32) -> Result<Self> {
        let link = HoytLink::with_mean_snr(q, gamma_bar)?;
        Self::new(link, vec![link; k], vec![link; k], QamScheme::new(m)?)
    }

    pub fn sd(&self) -> &HoytLink {
        &self.sd
    }
    pub fn sr(&self) -> &[HoytLink] {
        &self.sr
    }
    pub fn rd(&self) -> &[HoytLink] {
        &self.rd
    }
    pub fn qam(&self) -> &QamScheme {
        &self.qam
    }
    /// Number of relays `K`.
    pub fn relays(&self) -> usize {
        self.sr.len()
    }

    /// Links contributing to the MRC output in `state`: the direct link first,
    /// then the relay→destination links of the relays that decoded.
    pub fn combined_links<'a>(&'a self, state: &'a RelayState) -> impl Iterator<Item = &'a HoytLink> + 'a {
        std::iter::once(&self.sd).chain(
            self.rd
                .iter()
                .zip(state.bits())
                .filter(|(_, &on)| on)
                .map(|(l, _)| l),
        )
    }

    pub(crate) fn check_state(&self, state: &RelayState) -> Result<()> {
        if state.len() != self.relays() {
            return Err(Error::domain(format!(
                "relay state has {} entries for {} relays",
                state.len(),
                self.relays()
            )));
        }
        Ok(())
    }
}

/// Decoding outcome of every relay (`true` = decoded correctly and forwards).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelayState {
    bits: Vec<bool>,
}

impl RelayState {
    pub fn new(bits: Vec<bool>) -> Self {
        RelayState { bits }
    }

    /// State `z` of `k` relays: relay `i` is active iff bit `i` of `z` is set.
    pub fn from_index(z: u64, k: usize) -> Self {
        RelayState {
            bits: (0..k).map(|i| (z >> i) & 1 == 1).collect(),
        }
    }

    pub fn index(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | ((b as u64) << i))
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
    pub fn len(&self) -> usize {
        self.bits.len()
    }
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
    /// Number of forwarding relays.
    pub fn active_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// All `2^k` states in ascending index order.
    pub fn all(k: usize) -> impl Iterator<Item = RelayState> {
        (0..1u64 << k).map(move |z| RelayState::from_index(z, k))
    }
}

/// One term of the state sum.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTerm {
    pub state: RelayState,
    pub probability: f64,
    pub conditional_error: f64,
}

/// Total SER with its per-state decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct SerBreakdown {
    pub total: f64,
    pub relay_errors: Vec<f64>,
    pub states: Vec<StateTerm>,
}

/// `P(B = state) = Π_k p_k^{1−b_k} (1 − p_k)^{b_k}`.
pub fn state_probability(state: &RelayState, relay_errors: &[f64]) -> Result<f64> {
    if state.len() != relay_errors.len() {
        return Err(Error::domain(format!(
            "{} relay error probabilities for a {}-relay state",
            relay_errors.len(),
            state.len()
        )));
    }
    Ok(state
        .bits()
        .iter()
        .zip(relay_errors)
        .map(|(&on, &p)| if on { 1.0 - p } else { p })
        .product())
}

/// Symbol-error probability of a single hop (relay decoding failure).
pub fn relay_error_prob(link: &HoytLink, qam: &QamScheme) -> Result<f64> {
    relay_error_prob_with(&Lauricella, link, qam)
}

pub fn relay_error_prob_with(
    route: &dyn ErrorIntegrals,
    link: &HoytLink,
    qam: &QamScheme,
) -> Result<f64> {
    let (i3, i4) = route.relay(link, qam)?;
    Ok(qam.error_from_integrals(i3, i4))
}

/// Destination error probability after MRC given the relay states.
pub fn conditional_dest_error(scenario: &NetworkScenario, state: &RelayState) -> Result<f64> {
    conditional_dest_error_with(&Lauricella, scenario, state)
}

pub fn conditional_dest_error_with(
    route: &dyn ErrorIntegrals,
    scenario: &NetworkScenario,
    state: &RelayState,
) -> Result<f64> {
    let (i1, i2) = route.destination(scenario, state)?;
    Ok(scenario.qam.error_from_integrals(i1, i2))
}

/// Average SER by enumeration of all relay states, using the i.n.i.d
/// Lauricella closed forms.
pub fn total_ser(scenario: &NetworkScenario) -> Result<SerBreakdown> {
    total_ser_with(&Lauricella, scenario)
}

/// [`total_ser`] with a chosen evaluation route for the error integrals.
///
/// States are evaluated in parallel and summed in ascending index order, so
/// the result does not depend on the thread count.
pub fn total_ser_with(route: &dyn ErrorIntegrals, scenario: &NetworkScenario) -> Result<SerBreakdown> {
    let k = scenario.relays();
    if k > MAX_RELAYS {
        return Err(Error::Resource(format!(
            "{k} relays would need 2^{k} states; at most {MAX_RELAYS} relays are enumerated"
        )));
    }
    let relay_errors = scenario
        .sr
        .par_iter()
        .map(|l| relay_error_prob_with(route, l, &scenario.qam))
        .collect::<Result<Vec<_>>>()?;

    let states = (0..1u64 << k)
        .into_par_iter()
        .map(|z| {
            let state = RelayState::from_index(z, k);
            let probability = state_probability(&state, &relay_errors)?;
            let conditional_error = conditional_dest_error_with(route, scenario, &state)?;
            Ok(StateTerm {
                state,
                probability,
                conditional_error,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let total = states
        .iter()
        .map(|t| t.probability * t.conditional_error)
        .sum();
    Ok(SerBreakdown {
        total,
        relay_errors,
        states,
    })
}
