//! Link-level Monte Carlo simulation of the two-phase decode-and-forward
//! protocol.
//!
//! Each trial draws a QAM symbol, broadcasts it to the destination and every
//! relay over independent Hoyt-faded AWGN hops, lets each relay detect it and
//! forward only on a correct decision, and combines the direct and forwarded
//! branches at the destination by maximal-ratio combining.
//!
//! Trials are grouped into blocks of [`BLOCK_SIZE`]; block `b` draws from
//! ChaCha8 stream `b` of the seed, so results do not depend on how blocks are
//! scheduled across threads.

mod constellation;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::analytic::{NetworkScenario, RelayState};
use crate::channel::HoytLink;
use crate::error::{Error, Result};

pub use constellation::Constellation;

pub const BLOCK_SIZE: u64 = 65_536;

/// Per-state histograms are kept up to this many relays.
const MAX_TRACKED_RELAYS: usize = 16;

/// How channel gains are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fading {
    /// Hoyt fading per each link's `q` and `Ω`.
    #[default]
    Hoyt,
    /// Gains pinned to `√Ω` (pure AWGN), for calibration.
    None,
}

impl Fading {
    fn gain<R: Rng + ?Sized>(&self, link: &HoytLink, rng: &mut R) -> Complex64 {
        match self {
            Fading::Hoyt => link.sample_gain(rng),
            Fading::None => Complex64::new(link.omega().sqrt(), 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub symbol_error: bool,
    pub active_relays: RelayState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SerEstimate {
    pub ser: f64,
    pub errors: u64,
    pub trials: u64,
    pub std_error: f64,
    pub seed: u64,
}

impl SerEstimate {
    fn new(errors: u64, trials: u64, seed: u64) -> Self {
        let ser = errors as f64 / trials as f64;
        SerEstimate {
            ser,
            errors,
            trials,
            std_error: (ser * (1.0 - ser) / trials as f64).sqrt(),
            seed,
        }
    }
}

/// Aggregate counts of a simulation run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimReport {
    pub trials: u64,
    pub seed: u64,
    pub errors: u64,
    /// Decoding failures per relay.
    pub relay_failures: Vec<u64>,
    /// Occurrences of each relay state (indexed as [`RelayState::index`]);
    /// empty beyond 16 relays.
    pub state_counts: Vec<u64>,
}

impl SimReport {
    pub fn estimate(&self) -> SerEstimate {
        SerEstimate::new(self.errors, self.trials, self.seed)
    }

    fn empty(k: usize, trials: u64, seed: u64) -> Self {
        SimReport {
            trials,
            seed,
            errors: 0,
            relay_failures: vec![0; k],
            state_counts: if k <= MAX_TRACKED_RELAYS {
                vec![0; 1 << k]
            } else {
                Vec::new()
            },
        }
    }

    fn absorb(&mut self, other: &SimReport) {
        self.errors += other.errors;
        for (a, b) in self.relay_failures.iter_mut().zip(&other.relay_failures) {
            *a += b;
        }
        for (a, b) in self.state_counts.iter_mut().zip(&other.state_counts) {
            *a += b;
        }
    }
}

fn complex_noise<R: Rng + ?Sized>(link: &HoytLink, rng: &mut R) -> Complex64 {
    let sigma = (0.5 * link.noise()).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(sigma * re, sigma * im)
}

/// One trial; the relay decoding outcomes are returned as a bit mask
/// alongside the destination error flag.
fn trial<R: Rng + ?Sized>(
    scenario: &NetworkScenario,
    constellation: &Constellation,
    fading: Fading,
    rng: &mut R,
    relay_failed: &mut [bool],
) -> bool {
    let sent = rng.random_range(0..constellation.m() as usize);
    let x = constellation.points()[sent];

    let sd = scenario.sd();
    let h = fading.gain(sd, rng);
    let amp = sd.power().sqrt();
    let y = amp * h * x + complex_noise(sd, rng);
    let w = amp * h.conj() / sd.noise();
    let mut combined = w * y;
    let mut gain = sd.power() * h.norm_sqr() / sd.noise();

    for (k, (sr, rd)) in scenario.sr().iter().zip(scenario.rd()).enumerate() {
        let h_sr = fading.gain(sr, rng);
        let amp_sr = sr.power().sqrt();
        let y_sr = amp_sr * h_sr * x + complex_noise(sr, rng);
        let g_sr = amp_sr * h_sr.norm_sqr();
        let stat = if g_sr > 0.0 {
            y_sr * h_sr.conj() / g_sr
        } else {
            Complex64::new(0.0, 0.0)
        };
        let decoded = constellation.demodulate(stat) == sent;
        relay_failed[k] = !decoded;

        let h_rd = fading.gain(rd, rng);
        let n_rd = complex_noise(rd, rng);
        if decoded {
            let amp_rd = rd.power().sqrt();
            let y_rd = amp_rd * h_rd * x + n_rd;
            combined += amp_rd * h_rd.conj() / rd.noise() * y_rd;
            gain += rd.power() * h_rd.norm_sqr() / rd.noise();
        }
    }

    let stat = if gain > 0.0 {
        combined / gain
    } else {
        Complex64::new(0.0, 0.0)
    };
    constellation.demodulate(stat) != sent
}

fn check_constellation(scenario: &NetworkScenario, c: &Constellation) -> Result<()> {
    if c.m() != scenario.qam().m() {
        return Err(Error::domain(format!(
            "constellation order {} does not match scenario order {}",
            c.m(),
            scenario.qam().m()
        )));
    }
    Ok(())
}

/// One broadcast/relay/combine trial with Hoyt fading.
pub fn run_trial<R: Rng + ?Sized>(
    scenario: &NetworkScenario,
    constellation: &Constellation,
    rng: &mut R,
) -> Result<TrialOutcome> {
    check_constellation(scenario, constellation)?;
    let mut failed = vec![false; scenario.relays()];
    let symbol_error = trial(scenario, constellation, Fading::Hoyt, rng, &mut failed);
    Ok(TrialOutcome {
        symbol_error,
        active_relays: RelayState::new(failed.iter().map(|f| !f).collect()),
    })
}

fn run_block(
    scenario: &NetworkScenario,
    constellation: &Constellation,
    fading: Fading,
    seed: u64,
    block: u64,
    trials: u64,
) -> SimReport {
    let k = scenario.relays();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    let mut report = SimReport::empty(k, trials, seed);
    let mut failed = vec![false; k];
    let track = !report.state_counts.is_empty();
    for _ in 0..trials {
        if trial(scenario, constellation, fading, &mut rng, &mut failed) {
            report.errors += 1;
        }
        let mut mask = 0usize;
        for (i, &f) in failed.iter().enumerate() {
            if f {
                report.relay_failures[i] += 1;
            } else {
                mask |= 1 << i;
            }
        }
        if track {
            report.state_counts[mask] += 1;
        }
    }
    report
}

/// Runs `trials` trials and returns full counts.
pub fn simulate(
    scenario: &NetworkScenario,
    trials: u64,
    seed: u64,
    fading: Fading,
) -> Result<SimReport> {
    if trials == 0 {
        return Err(Error::domain("at least one trial is required"));
    }
    let constellation = Constellation::square_qam(scenario.qam().m())?;
    let blocks = trials.div_ceil(BLOCK_SIZE);
    let parts: Vec<SimReport> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let n = BLOCK_SIZE.min(trials - b * BLOCK_SIZE);
            run_block(scenario, &constellation, fading, seed, b, n)
        })
        .collect();
    let mut total = SimReport::empty(scenario.relays(), trials, seed);
    for p in &parts {
        total.absorb(p);
    }
    Ok(total)
}

/// Monte Carlo SER estimate under Hoyt fading.
pub fn estimate_ser(scenario: &NetworkScenario, trials: u64, seed: u64) -> Result<SerEstimate> {
    Ok(simulate(scenario, trials, seed, Fading::Hoyt)?.estimate())
}
