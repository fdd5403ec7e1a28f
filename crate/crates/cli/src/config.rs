//! TOML sweep configuration.
//!
//! ```toml
//! m = [4, 16]
//! k = 2
//! q = [0.3, 1.0]
//! snr_db = { start = 0, stop = 30, step = 2 }
//! mode = "compare"
//! trials = 1000000
//! seed = 7
//! out = "ser.csv"
//! ```
//!
//! `m`, `k`, `q` accept a scalar or a list and span the sweep grid. `q` is
//! the fading parameter of every hop unless `q_sd`, `q_sr` or `q_rd`
//! override it. Per-relay keys (`q_sr`, `q_rd`, `omega_sr`, `omega_rd`,
//! `power_r`) take one value for all relays or one value per relay.

use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize};

use dfrelay::analytic::{qam_scheme, NetworkScenario};
use dfrelay::channel::{db_to_linear, HoytLink};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Analytic,
    Simulate,
    Compare,
}

impl Mode {
    pub fn analytic(self) -> bool {
        matches!(self, Mode::Analytic | Mode::Compare)
    }
    pub fn simulated(self) -> bool {
        matches!(self, Mode::Simulate | Mode::Compare)
    }
}

/// Hop families the SNR axis can drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkKind {
    Sd,
    Sr,
    Rd,
}

impl LinkKind {
    pub const ALL: [LinkKind; 3] = [LinkKind::Sd, LinkKind::Sr, LinkKind::Rd];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnrGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for SnrGrid {
    fn default() -> Self {
        SnrGrid {
            start: 0.0,
            stop: 30.0,
            step: 2.0,
        }
    }
}

impl SnrGrid {
    /// Grid values in dB; empty when `start > stop`.
    pub fn values(&self) -> Vec<f64> {
        if self.start > self.stop {
            return Vec::new();
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n)
            .map(|i| {
                let v = self.start + i as f64 * self.step;
                (v * 1e9).round() / 1e9
            })
            .collect()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

fn one_or_many<'de, D, T>(d: D) -> Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

fn opt_one_or_many<'de, D, T>(d: D) -> Result<Option<Vec<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    one_or_many(d).map(Some)
}

fn default_m() -> Vec<u32> {
    vec![4]
}
fn default_k() -> Vec<usize> {
    vec![1]
}
fn default_q() -> Vec<f64> {
    vec![1.0]
}
fn one() -> f64 {
    1.0
}
fn ones() -> Vec<f64> {
    vec![1.0]
}
fn default_trials() -> u64 {
    1_000_000
}
fn default_method() -> String {
    "lauricella".into()
}
fn default_simulator() -> String {
    "monte-carlo".into()
}
fn all_links() -> Vec<LinkKind> {
    LinkKind::ALL.to_vec()
}

/// A validated sweep description.
///
/// Parsing fills every default in, so serialising a parsed config and
/// parsing it again gives the same value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_m", deserialize_with = "one_or_many")]
    pub m: Vec<u32>,
    #[serde(default = "default_k", deserialize_with = "one_or_many")]
    pub k: Vec<usize>,
    #[serde(default = "default_q", deserialize_with = "one_or_many")]
    pub q: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_sd: Option<f64>,
    #[serde(default, deserialize_with = "opt_one_or_many", skip_serializing_if = "Option::is_none")]
    pub q_sr: Option<Vec<f64>>,
    #[serde(default, deserialize_with = "opt_one_or_many", skip_serializing_if = "Option::is_none")]
    pub q_rd: Option<Vec<f64>>,
    #[serde(default = "one")]
    pub omega_sd: f64,
    #[serde(default = "ones", deserialize_with = "one_or_many")]
    pub omega_sr: Vec<f64>,
    #[serde(default = "ones", deserialize_with = "one_or_many")]
    pub omega_rd: Vec<f64>,
    /// Source transmit power, shared by the direct and source→relay hops.
    #[serde(default = "one")]
    pub power_s: f64,
    #[serde(default = "ones", deserialize_with = "one_or_many")]
    pub power_r: Vec<f64>,
    #[serde(default = "one")]
    pub noise: f64,
    #[serde(default)]
    pub snr_db: SnrGrid,
    /// Hops whose transmit power is scaled by `10^(snr_db/10)`.
    #[serde(default = "all_links", deserialize_with = "one_or_many")]
    pub snr_links: Vec<LinkKind>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "default_method")]
    pub method: String,
    #[serde(default = "default_simulator")]
    pub simulator: String,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        parse_config("").expect("empty document is valid")
    }
}

/// Parses and validates a TOML document.
pub fn parse_config(text: &str) -> Result<SweepConfig, CliError> {
    let cfg: SweepConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn per_relay(key: &str, values: &[f64], k: usize) -> Result<Vec<f64>, CliError> {
    match values.len() {
        1 => Ok(vec![values[0]; k]),
        n if n == k => Ok(values.to_vec()),
        n => Err(invalid(format!("`{key}` has {n} values but the grid has K={k}"))),
    }
}

/// One point of the sweep grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub m: u32,
    pub k: usize,
    pub q: f64,
    pub snr_db: f64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        for (key, empty) in [
            ("m", self.m.is_empty()),
            ("k", self.k.is_empty()),
            ("q", self.q.is_empty()),
            ("omega_sr", self.omega_sr.is_empty()),
            ("omega_rd", self.omega_rd.is_empty()),
            ("power_r", self.power_r.is_empty()),
            ("snr_links", self.snr_links.is_empty()),
        ] {
            if empty {
                return Err(invalid(format!("`{key}` must not be empty")));
            }
        }
        if !(self.snr_db.step > 0.0 && self.snr_db.step.is_finite()) {
            return Err(invalid(format!("snr_db.step = {} must be positive", self.snr_db.step)));
        }
        if !(self.snr_db.start.is_finite() && self.snr_db.stop.is_finite()) {
            return Err(invalid("snr_db bounds must be finite"));
        }
        if self.trials == 0 {
            return Err(invalid("`trials` must be at least 1"));
        }
        for &m in &self.m {
            qam_scheme(m).map_err(|e| invalid(format!("`m`: {e}")))?;
        }
        // Building one scenario per (m, k, q) at the first SNR catches
        // per-relay length mismatches and invalid link parameters up front.
        let snr = self.snr_db.values().first().copied().unwrap_or(self.snr_db.start);
        for &m in &self.m {
            for &k in &self.k {
                for &q in &self.q {
                    self.scenario(&GridPoint { m, k, q, snr_db: snr })?;
                }
            }
        }
        Ok(())
    }

    /// Grid points in lexicographic `(m, k, q, snr)` order.
    pub fn grid(&self) -> Vec<GridPoint> {
        let snrs = self.snr_db.values();
        let mut out = Vec::new();
        for &m in &self.m {
            for &k in &self.k {
                for &q in &self.q {
                    for &snr_db in &snrs {
                        out.push(GridPoint { m, k, q, snr_db });
                    }
                }
            }
        }
        out
    }

    fn drives(&self, kind: LinkKind) -> bool {
        self.snr_links.contains(&kind)
    }

    /// Network at one grid point.
    pub fn scenario(&self, p: &GridPoint) -> Result<NetworkScenario, CliError> {
        let gain = db_to_linear(p.snr_db);
        let scale = |kind| if self.drives(kind) { gain } else { 1.0 };
        let k = p.k;
        let q_sr = per_relay("q_sr", self.q_sr.as_deref().unwrap_or(&[p.q]), k)?;
        let q_rd = per_relay("q_rd", self.q_rd.as_deref().unwrap_or(&[p.q]), k)?;
        let omega_sr = per_relay("omega_sr", &self.omega_sr, k)?;
        let omega_rd = per_relay("omega_rd", &self.omega_rd, k)?;
        let power_r = per_relay("power_r", &self.power_r, k)?;

        let sd = HoytLink::new(
            self.q_sd.unwrap_or(p.q),
            self.omega_sd,
            self.power_s * scale(LinkKind::Sd),
            self.noise,
        )?;
        let sr = (0..k)
            .map(|i| HoytLink::new(q_sr[i], omega_sr[i], self.power_s * scale(LinkKind::Sr), self.noise))
            .collect::<dfrelay::Result<Vec<_>>>()?;
        let rd = (0..k)
            .map(|i| HoytLink::new(q_rd[i], omega_rd[i], power_r[i] * scale(LinkKind::Rd), self.noise))
            .collect::<dfrelay::Result<Vec<_>>>()?;
        Ok(NetworkScenario::new(sd, sr, rd, qam_scheme(p.m)?)?)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }
}
