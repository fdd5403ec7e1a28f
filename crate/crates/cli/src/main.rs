use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dfrelay::evaluator::EvaluatorRegistry;
use dfrelay::validate;
use dfrelay_cli::{emit_csv, parse_config, run_sweep, write_csv, CliError, LinkKind, Mode, SweepConfig};

#[derive(Parser)]
#[command(name = "dfrelay", version, about = "SER of decode-and-forward relay networks over Hoyt fading")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact SER over the sweep grid.
    Analytic(SweepArgs),
    /// Monte Carlo SER over the sweep grid.
    Simulate(SweepArgs),
    /// Exact and simulated SER side by side with a 3-sigma agreement flag.
    Compare(SweepArgs),
    /// Run the built-in oracle and invariant checks.
    Validate {
        /// Run only the named check (repeatable).
        #[arg(long = "check")]
        checks: Vec<String>,
        /// List the available checks and exit.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// TOML configuration file; flags override its values.
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<f64>>,
    #[arg(long)]
    q_sd: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    q_sr: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    q_rd: Option<Vec<f64>>,
    #[arg(long)]
    omega_sd: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    omega_sr: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    omega_rd: Option<Vec<f64>>,
    #[arg(long)]
    power_s: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    power_r: Option<Vec<f64>>,
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    snr_start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    snr_stop: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    snr_step: Option<f64>,
    /// Hops driven by the SNR axis: sd, sr, rd.
    #[arg(long, value_delimiter = ',', value_parser = parse_link)]
    snr_links: Option<Vec<LinkKind>>,
    /// Exact evaluator: lauricella, lauricella-iid or quadrature.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    simulator: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination; standard output when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Print the effective configuration as TOML and exit.
    #[arg(long)]
    dump_config: bool,
}

fn parse_link(s: &str) -> Result<LinkKind, String> {
    match s {
        "sd" => Ok(LinkKind::Sd),
        "sr" => Ok(LinkKind::Sr),
        "rd" => Ok(LinkKind::Rd),
        _ => Err(format!("unknown link `{s}` (expected sd, sr or rd)")),
    }
}

impl SweepArgs {
    fn resolve(self, mode: Mode) -> Result<SweepConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                parse_config(&text)?
            }
            None => SweepConfig::default(),
        };
        cfg.mode = mode;
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    cfg.$field = v;
                }
            )*};
        }
        set!(m, k, q, omega_sd, omega_sr, omega_rd, power_s, power_r, noise, snr_links, method, simulator, trials);
        if self.q_sd.is_some() {
            cfg.q_sd = self.q_sd;
        }
        if self.q_sr.is_some() {
            cfg.q_sr = self.q_sr;
        }
        if self.q_rd.is_some() {
            cfg.q_rd = self.q_rd;
        }
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        if self.out.is_some() {
            cfg.out = self.out;
        }
        if let Some(v) = self.snr_start {
            cfg.snr_db.start = v;
        }
        if let Some(v) = self.snr_stop {
            cfg.snr_db.stop = v;
        }
        if let Some(v) = self.snr_step {
            cfg.snr_db.step = v;
        }
        cfg.validate()?;
        if mode.simulated() && cfg.seed.is_none() {
            return Err(CliError::Config("--seed is required for simulate and compare".into()));
        }
        Ok(cfg)
    }
}

fn sweep(args: SweepArgs, mode: Mode) -> Result<ExitCode, CliError> {
    let dump = args.dump_config;
    let cfg = args.resolve(mode)?;
    if dump {
        print!("{}", cfg.to_toml()?);
        return Ok(ExitCode::SUCCESS);
    }
    let result = run_sweep(&cfg, &EvaluatorRegistry::with_defaults())?;
    match &cfg.out {
        Some(path) => emit_csv(&result, path)?,
        None => write_csv(&result, std::io::stdout().lock())?,
    }
    if mode == Mode::Compare {
        let flagged: Vec<bool> = result.rows.iter().filter_map(|r| r.pass).collect();
        let passed = flagged.iter().filter(|&&p| p).count();
        eprintln!("{passed}/{} points within 3 sigma", flagged.len());
    }
    let failed = result.failed_rows();
    if failed > 0 {
        eprintln!("{failed} grid point(s) failed; see the error column");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn run_checks(names: Vec<String>, list: bool) -> Result<ExitCode, CliError> {
    if list {
        for c in &validate::CHECKS {
            println!("{:<26} {}", c.name, c.description);
        }
        return Ok(ExitCode::SUCCESS);
    }
    let selected: Vec<_> = if names.is_empty() {
        validate::CHECKS.iter().collect()
    } else {
        names
            .iter()
            .map(|n| validate::find(n).ok_or_else(|| CliError::Config(format!("unknown check `{n}`"))))
            .collect::<Result<_, _>>()?
    };
    let mut all_passed = true;
    for check in selected {
        let r = check.run();
        all_passed &= r.passed;
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    Ok(if all_passed { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Analytic(a) => sweep(a, Mode::Analytic),
        Command::Simulate(a) => sweep(a, Mode::Simulate),
        Command::Compare(a) => sweep(a, Mode::Compare),
        Command::Validate { checks, list } => run_checks(checks, list),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
