use std::fs::File;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use dfrelay::evaluator::{EvalContext, EvaluatorRegistry};
use dfrelay::Error;

use crate::config::{GridPoint, SweepConfig};
use crate::CliError;

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub snr_db: f64,
    pub q_sd: f64,
    pub q_sr: Vec<f64>,
    pub q_rd: Vec<f64>,
    pub k: usize,
    pub m: u32,
    pub ser_analytic: Option<f64>,
    pub ser_sim: Option<f64>,
    pub stderr: Option<f64>,
    pub rel_dev: Option<f64>,
    pub pass: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

/// Evaluates every grid point of `cfg`.
///
/// Points run in parallel; rows come back in grid order. A failing point
/// yields a row with `error` set and the sweep carries on.
pub fn run_sweep(cfg: &SweepConfig, registry: &EvaluatorRegistry) -> Result<SweepResult, CliError> {
    let analytic = if cfg.mode.analytic() {
        Some(registry.get(&cfg.method)?)
    } else {
        None
    };
    let simulator = if cfg.mode.simulated() {
        if cfg.seed.is_none() {
            return Err(CliError::Config(format!("mode {:?} needs a seed", cfg.mode).to_lowercase()));
        }
        Some(registry.get(&cfg.simulator)?)
    } else {
        None
    };
    let base_seed = cfg.seed.unwrap_or(0);

    let rows = cfg
        .grid()
        .into_par_iter()
        .enumerate()
        .map(|(i, point)| {
            let scenario = cfg.scenario(&point)?;
            let mut row = blank_row(&point, &scenario);
            let ctx = EvalContext {
                trials: cfg.trials,
                seed: base_seed.wrapping_add(i as u64),
            };
            let outcome = (|| -> dfrelay::Result<()> {
                if let Some(e) = &analytic {
                    row.ser_analytic = Some(e.evaluate(&scenario, &ctx)?.ser);
                }
                if let Some(e) = &simulator {
                    let v = e.evaluate(&scenario, &ctx)?;
                    row.ser_sim = Some(v.ser);
                    row.stderr = v.std_error;
                }
                Ok(())
            })();
            if let Err(e) = outcome {
                row.error = Some(e.to_string());
            }
            if let (Some(a), Some(s)) = (row.ser_analytic, row.ser_sim) {
                let sigma = (a * (1.0 - a) / cfg.trials as f64).sqrt();
                row.rel_dev = Some((s - a) / a);
                row.pass = Some((s - a).abs() <= 3.0 * sigma);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(SweepResult { rows })
}

fn blank_row(p: &GridPoint, s: &dfrelay::analytic::NetworkScenario) -> SweepRow {
    SweepRow {
        snr_db: p.snr_db,
        q_sd: s.sd().q(),
        q_sr: s.sr().iter().map(|l| l.q()).collect(),
        q_rd: s.rd().iter().map(|l| l.q()).collect(),
        k: p.k,
        m: p.m,
        ser_analytic: None,
        ser_sim: None,
        stderr: None,
        rel_dev: None,
        pass: None,
        error: None,
    }
}

pub const CSV_HEADER: [&str; 12] = [
    "snr_db",
    "q_sd",
    "q_sr",
    "q_rd",
    "k",
    "m",
    "ser_analytic",
    "ser_sim",
    "stderr",
    "rel_dev",
    "pass",
    "error",
];

fn sci(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.8e}")).unwrap_or_default()
}

fn joined(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(";")
}

/// Writes `result` as CSV; relay lists are `;`-separated within a field.
pub fn write_csv<W: Write>(result: &SweepResult, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &result.rows {
        w.write_record([
            r.snr_db.to_string(),
            r.q_sd.to_string(),
            joined(&r.q_sr),
            joined(&r.q_rd),
            r.k.to_string(),
            r.m.to_string(),
            sci(r.ser_analytic),
            sci(r.ser_sim),
            sci(r.stderr),
            sci(r.rel_dev),
            r.pass.map(|p| p.to_string()).unwrap_or_default(),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(|e| CliError::Io {
        path: "<csv>".into(),
        source: e,
    })?;
    Ok(())
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = File::create(path).map_err(io)?;
    write_csv(result, file).map_err(|e| match e {
        CliError::Io { source, .. } => io(source),
        other => other,
    })
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Csv(e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}
