//! Built-in oracle and invariant suite.
//!
//! Each [`Check`] recomputes one family of results along two independent
//! routes (closed form against quadrature, analytic against simulation,
//! analytic law against sampled gains) or tests a qualitative ordering over
//! a parameter sweep, and reports pass/fail with a one-line summary.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytic::{
    i1_closed, i1_iid, i2_closed, i2_iid, i3_closed, i4_closed, qam_scheme, relay_oracle_quadrature,
    ser_oracle_quadrature, total_ser, NetworkScenario, RelayState,
};
use crate::channel::{db_to_linear, HoytLink};
use crate::error::Result;
use crate::mcsim::{simulate, Fading};
use crate::specfun::{lauricella_fd, LauricellaArgs, QuadratureSpec};

/// Orders, relay counts, fading parameters and mean SNRs (dB) of the
/// cross-check grid.
pub const GRID_M: [u32; 2] = [4, 16];
pub const GRID_K: [usize; 4] = [0, 1, 2, 3];
pub const GRID_Q: [f64; 3] = [0.3, 0.5, 1.0];
pub const GRID_SNR_DB: [f64; 4] = [0.0, 5.0, 10.0, 20.0];

/// SNR axis of the figure-style sweeps, in dB.
pub fn sweep_snr_db() -> Vec<f64> {
    (0..=15).map(|i| 2.0 * i as f64).collect()
}

/// How per-link parameters are spread around a grid point `(q, γ̄)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assignment {
    /// Every hop at `(q, γ̄)`.
    Identical,
    /// Common `q`; per-hop SNR offsets of a few dB.
    SnrSpread,
    /// Per-hop `q` drawn cyclically from the grid, with SNR offsets.
    Mixed,
}

impl Assignment {
    pub const ALL: [Assignment; 3] = [Assignment::Identical, Assignment::SnrSpread, Assignment::Mixed];

    pub fn scenario(self, m: u32, k: usize, q: f64, snr_db: f64) -> Result<NetworkScenario> {
        let link = |q: f64, offset_db: f64| HoytLink::with_mean_snr(q, db_to_linear(snr_db + offset_db));
        let cycle = [0.3, 0.5, 0.7, 1.0];
        let start = cycle.iter().position(|&c| c == q).unwrap_or(0);
        let (sd, sr, rd) = match self {
            Assignment::Identical => (
                link(q, 0.0)?,
                (0..k).map(|_| link(q, 0.0)).collect::<Result<Vec<_>>>()?,
                (0..k).map(|_| link(q, 0.0)).collect::<Result<Vec<_>>>()?,
            ),
            Assignment::SnrSpread => (
                link(q, -3.0)?,
                (0..k).map(|i| link(q, 2.0 * (i + 1) as f64)).collect::<Result<Vec<_>>>()?,
                (0..k).map(|i| link(q, -(i as f64) - 1.0)).collect::<Result<Vec<_>>>()?,
            ),
            Assignment::Mixed => (
                link(q, 0.0)?,
                (0..k)
                    .map(|i| link(cycle[(start + i + 1) % 4], i as f64))
                    .collect::<Result<Vec<_>>>()?,
                (0..k)
                    .map(|i| link(cycle[(start + i + 2) % 4], 1.5 - i as f64))
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        NetworkScenario::new(sd, sr, rd, qam_scheme(m)?)
    }
}

/// Every `(assignment, M, K, q, snr_db)` point of the cross-check grid.
pub fn cross_check_grid(assignments: &[Assignment]) -> Vec<(Assignment, u32, usize, f64, f64)> {
    let mut out = Vec::new();
    for &a in assignments {
        for m in GRID_M {
            for k in GRID_K {
                for q in GRID_Q {
                    for snr in GRID_SNR_DB {
                        out.push((a, m, k, q, snr));
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Copy)]
pub struct Check {
    pub name: &'static str,
    pub description: &'static str,
    run: fn() -> Result<(bool, String)>,
}

impl std::fmt::Debug for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Check").field("name", &self.name).finish()
    }
}

impl Check {
    pub fn run(&self) -> CheckReport {
        match (self.run)() {
            Ok((passed, detail)) => CheckReport {
                name: self.name,
                passed,
                detail,
            },
            Err(e) => CheckReport {
                name: self.name,
                passed: false,
                detail: format!("error: {e}"),
            },
        }
    }
}

pub const CHECKS: [Check; 8] = [
    Check {
        name: "closed-vs-quadrature",
        description: "closed-form error integrals match direct quadrature (1e-6 relative)",
        run: closed_vs_quadrature,
    },
    Check {
        name: "analytic-vs-monte-carlo",
        description: "analytic SER within 3 sigma of 1e6-trial simulation on >= 99% of points with SER >= 1e-4",
        run: analytic_vs_monte_carlo,
    },
    Check {
        name: "rayleigh-reduction",
        description: "q = 1 MGF and direct 4-QAM SER match Rayleigh closed forms",
        run: rayleigh_reduction,
    },
    Check {
        name: "structural-reductions",
        description: "empty-state, identical-link and zero-argument reductions",
        run: structural_reductions,
    },
    Check {
        name: "channel-law",
        description: "CDF derivative equals PDF and sampled SNR passes Kolmogorov-Smirnov",
        run: channel_law,
    },
    Check {
        name: "relay-count-ordering",
        description: "SER falls with relay count and with q; direct link is worst",
        run: relay_count_ordering,
    },
    Check {
        name: "modulation-ordering",
        description: "16-QAM above 4-QAM with two K=2 networks, >= 10x apart at 25 dB in simulation",
        run: modulation_ordering,
    },
    Check {
        name: "q-sensitivity",
        description: "relay-to-destination fading degrades SER more than source-to-relay fading",
        run: q_sensitivity,
    },
];

pub fn find(name: &str) -> Option<&'static Check> {
    CHECKS.iter().find(|c| c.name == name)
}

pub fn run_all() -> Vec<CheckReport> {
    CHECKS.iter().map(Check::run).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        ((a - b) / b).abs()
    }
}

fn closed_vs_quadrature() -> Result<(bool, String)> {
    const TOL: f64 = 1e-6;
    let grid = cross_check_grid(&Assignment::ALL);
    let worst = grid
        .par_iter()
        .map(|&(a, m, k, q, snr)| -> Result<f64> {
            let s = a.scenario(m, k, q, snr)?;
            let mut worst = 0.0f64;
            for state in RelayState::all(k) {
                let (o1, o2) = ser_oracle_quadrature(&s, &state)?;
                worst = worst.max(rel(i1_closed(&s, &state)?, o1));
                worst = worst.max(rel(i2_closed(&s, &state)?, o2));
            }
            for link in std::iter::once(s.sd()).chain(s.sr()) {
                let (o3, o4) = relay_oracle_quadrature(link, s.qam())?;
                worst = worst.max(rel(i3_closed(link, s.qam())?, o3));
                worst = worst.max(rel(i4_closed(link, s.qam())?, o4));
            }
            Ok(worst)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok((
        worst < TOL,
        format!("{} scenarios, max relative deviation {worst:.2e} (limit {TOL:.0e})", grid.len()),
    ))
}

/// Trials per point and base seed of the simulation cross-check.
pub const CROSS_CHECK_TRIALS: u64 = 1_000_000;
pub const CROSS_CHECK_SEED: u64 = 0x5eed_0001;

/// One compared grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparedPoint {
    pub assignment: Assignment,
    pub m: u32,
    pub k: usize,
    pub q: f64,
    pub snr_db: f64,
    pub analytic: f64,
    pub simulated: f64,
    /// `(simulated − analytic) / σ` with `σ` the binomial standard error at the analytic SER.
    pub z: f64,
}

/// Analytic against simulated SER over the cross-check grid, restricted to
/// points whose analytic SER is at least `1e-4`.
pub fn compare_grid(trials: u64, seed: u64) -> Result<Vec<ComparedPoint>> {
    let grid = cross_check_grid(&Assignment::ALL);
    let rows = grid
        .par_iter()
        .enumerate()
        .map(|(i, &(assignment, m, k, q, snr_db))| -> Result<Option<ComparedPoint>> {
            let s = assignment.scenario(m, k, q, snr_db)?;
            let analytic = total_ser(&s)?.total;
            if analytic < 1e-4 {
                return Ok(None);
            }
            let simulated = simulate(&s, trials, seed.wrapping_add(i as u64), Fading::Hoyt)?
                .estimate()
                .ser;
            let sigma = (analytic * (1.0 - analytic) / trials as f64).sqrt();
            Ok(Some(ComparedPoint {
                assignment,
                m,
                k,
                q,
                snr_db,
                analytic,
                simulated,
                z: (simulated - analytic) / sigma,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn analytic_vs_monte_carlo() -> Result<(bool, String)> {
    let points = compare_grid(CROSS_CHECK_TRIALS, CROSS_CHECK_SEED)?;
    let failed: Vec<_> = points.iter().filter(|p| p.z.abs() > 3.0).collect();
    let rate = 1.0 - failed.len() as f64 / points.len() as f64;
    let by_m = |m| failed.iter().filter(|p| p.m == m).count();
    let worst = points.iter().map(|p| p.z.abs()).fold(0.0, f64::max);
    Ok((
        rate >= 0.99,
        format!(
            "{}/{} points within 3 sigma ({:.1}%, need 99%); failures M=4: {}, M=16: {}; max |z| {worst:.1}",
            points.len() - failed.len(),
            points.len(),
            100.0 * rate,
            by_m(4),
            by_m(16),
        ),
    ))
}

fn rayleigh_reduction() -> Result<(bool, String)> {
    let mut mgf_worst = 0.0f64;
    for gb in [0.1, 1.0, 10.0, 100.0] {
        let l = HoytLink::with_mean_snr(1.0, gb)?;
        for s in [-1e3, -10.0, -1.0, -0.1, -1e-3, 0.0, 0.1 / gb, 0.5 / gb, 0.9 / gb] {
            let want = 1.0 / (1.0 - s * gb);
            mgf_worst = mgf_worst.max((l.mgf(s)? - want).abs() / want.max(1.0));
        }
    }
    let qam = qam_scheme(4)?;
    let (c, g) = (qam.c_const(), qam.g_qam());
    let mut ser_worst = 0.0f64;
    for snr in [-5.0, 0.0, 5.0, 10.0, 20.0, 30.0] {
        let gb = db_to_linear(snr);
        let mu = (g * gb / (1.0 + g * gb)).sqrt();
        let want = 2.0 * c * (1.0 - mu) - c * c * (1.0 - 4.0 / PI * mu * (1.0 / mu).atan());
        let s = NetworkScenario::symmetric(0, 1.0, gb, 4)?;
        ser_worst = ser_worst.max(rel(total_ser(&s)?.total, want));
    }
    Ok((
        mgf_worst < 1e-12 && ser_worst < 1e-8,
        format!("MGF max deviation {mgf_worst:.2e} (limit 1e-12), direct 4-QAM SER {ser_worst:.2e} (limit 1e-8)"),
    ))
}

fn structural_reductions() -> Result<(bool, String)> {
    let mut empty_worst = 0.0f64;
    let mut iid_worst = 0.0f64;
    for m in GRID_M {
        for k in 1..=3 {
            for q in GRID_Q {
                for snr in GRID_SNR_DB {
                    let s = Assignment::Identical.scenario(m, k, q, snr)?;
                    let none = RelayState::new(vec![false; k]);
                    empty_worst = empty_worst
                        .max(rel(i1_closed(&s, &none)?, i3_closed(s.sd(), s.qam())?))
                        .max(rel(i2_closed(&s, &none)?, i4_closed(s.sd(), s.qam())?));
                    for state in RelayState::all(k) {
                        iid_worst = iid_worst
                            .max(rel(i1_iid(&s, &state)?, i1_closed(&s, &state)?))
                            .max(rel(i2_iid(&s, &state)?, i2_closed(&s, &state)?));
                    }
                }
            }
        }
    }
    let mut zero_worst = 0.0f64;
    let quad = QuadratureSpec::default();
    for (a, c) in [(1.5, 2.0), (2.5, 3.5), (0.7, 4.2)] {
        for n in 1..=7 {
            let args = LauricellaArgs::new(a, vec![0.5; n], c, vec![0.0; n])?;
            zero_worst = zero_worst.max((lauricella_fd(&args, &quad)? - 1.0).abs());
        }
    }
    Ok((
        empty_worst < 1e-10 && iid_worst < 1e-9 && zero_worst < 1e-10,
        format!(
            "empty state {empty_worst:.2e} (limit 1e-10), identical links {iid_worst:.2e} (limit 1e-9), zero arguments {zero_worst:.2e} (limit 1e-10)"
        ),
    ))
}

/// Kolmogorov–Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> Result<f64> + Sync>(mut samples: Vec<f64>, cdf: F) -> Result<f64> {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let gaps = samples
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x)?;
            Ok(((i + 1) as f64 / n - f).max(f - i as f64 / n))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(gaps.into_iter().fold(0.0, f64::max))
}

pub const KS_SAMPLES: usize = 1_000_000;

fn channel_law() -> Result<(bool, String)> {
    let mut deriv_worst = 0.0f64;
    let mut ks_worst = 0.0f64;
    for (i, q) in [0.3, 0.5, 1.0].into_iter().enumerate() {
        let link = HoytLink::with_mean_snr(q, 1.0)?;
        let gb = link.gamma_bar();
        let h = 1e-5 * gb;
        for j in 1..=200 {
            let g = 0.025 * j as f64 * gb;
            let d = (link.cdf_snr(g + h)? - link.cdf_snr(g - h)?) / (2.0 * h);
            deriv_worst = deriv_worst.max((d - link.pdf_snr(g)?).abs());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0xc0ffee + i as u64);
        let scale = link.power() / link.noise();
        let samples = (0..KS_SAMPLES)
            .map(|_| scale * link.sample_gain(&mut rng).norm_sqr())
            .collect();
        ks_worst = ks_worst.max(ks_statistic(samples, |g| link.cdf_snr(g))?);
    }
    Ok((
        deriv_worst < 1e-6 && ks_worst < 0.002,
        format!("CDF slope vs PDF {deriv_worst:.2e} (limit 1e-6), KS statistic {ks_worst:.5} (limit 0.002)"),
    ))
}

fn relay_count_ordering() -> Result<(bool, String)> {
    let snrs = sweep_snr_db();
    let mut violations = Vec::new();
    for &snr in &snrs {
        let mut ser = [[0.0; 4]; 2];
        for (qi, q) in [0.3, 1.0].into_iter().enumerate() {
            for (k, v) in ser[qi].iter_mut().enumerate() {
                *v = total_ser(&NetworkScenario::symmetric(k, q, db_to_linear(snr), 4)?)?.total;
            }
        }
        let cooperative_max = ser.iter().flat_map(|r| &r[1..]).cloned().fold(0.0, f64::max);
        if ser[0][0].min(ser[1][0]) <= cooperative_max {
            violations.push(format!("direct link not worst at {snr} dB"));
        }
        if snr >= 5.0 {
            for (qi, row) in ser.iter().enumerate() {
                if !(row[1] > row[2] && row[2] > row[3]) {
                    violations.push(format!("K order at {snr} dB, q index {qi}"));
                }
            }
            for (k, (low_q, high_q)) in ser[0].iter().zip(&ser[1]).enumerate() {
                if low_q <= high_q {
                    violations.push(format!("q order at {snr} dB, K={k}"));
                }
            }
        }
    }
    Ok((
        violations.is_empty(),
        if violations.is_empty() {
            format!("M=4, K 0..3, q 0.3/1.0 over {} SNR points: all orderings hold", snrs.len())
        } else {
            violations.join("; ")
        },
    ))
}

/// Two-sided Wilson score interval at `z` standard deviations.
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

pub const MODULATION_TRIALS_16: u64 = 10_000_000;
pub const MODULATION_TRIALS_4: u64 = 100_000_000;

fn modulation_ordering() -> Result<(bool, String)> {
    let mut snrs = sweep_snr_db();
    snrs.push(25.0);
    let mut violations = Vec::new();
    for q in [0.3, 1.0] {
        for &snr in &snrs {
            let gb = db_to_linear(snr);
            let four = total_ser(&NetworkScenario::symmetric(2, q, gb, 4)?)?.total;
            let sixteen = total_ser(&NetworkScenario::symmetric(2, q, gb, 16)?)?.total;
            if sixteen <= four {
                violations.push(format!("q={q} {snr} dB"));
            }
        }
    }
    let gb = db_to_linear(25.0);
    let sim = |m, trials, seed| -> Result<(u64, u64)> {
        let r = simulate(&NetworkScenario::symmetric(2, 1.0, gb, m)?, trials, seed, Fading::Hoyt)?;
        Ok((r.errors, r.trials))
    };
    let (e16, n16) = sim(16, MODULATION_TRIALS_16, 0x16)?;
    let (e4, n4) = sim(4, MODULATION_TRIALS_4, 0x04)?;
    let low16 = wilson_interval(e16, n16, 3.0).0;
    let high4 = wilson_interval(e4, n4, 3.0).1;
    let separated = low16 >= 10.0 * high4;
    Ok((
        violations.is_empty() && separated,
        format!(
            "analytic ordering violations: {}; 25 dB q=1 simulated 16-QAM >= {low16:.2e}, 4-QAM <= {high4:.2e} (ratio >= {:.0}, need 10)",
            if violations.is_empty() { "none".to_string() } else { violations.join(", ") },
            low16 / high4
        ),
    ))
}

fn q_sensitivity() -> Result<(bool, String)> {
    let gb = db_to_linear(15.0);
    let l = |q| HoytLink::with_mean_snr(q, gb);
    let build = |q_sr: f64, q_rd: f64| -> Result<f64> {
        let s = NetworkScenario::new(l(1.0)?, vec![l(q_sr)?; 2], vec![l(q_rd)?; 2], qam_scheme(4)?)?;
        Ok(total_ser(&s)?.total)
    };
    let base = build(1.0, 1.0)?;
    let rd = build(1.0, 0.3)? - base;
    let sr = build(0.3, 1.0)? - base;
    Ok((
        rd > sr && rd > 0.0,
        format!("base {base:.3e}; degrading relay-destination q adds {rd:.3e}, source-relay q adds {sr:.3e}"),
    ))
}
