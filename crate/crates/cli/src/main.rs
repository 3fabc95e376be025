//! `dichotomy`: parameter sweeps of the power-spectrum growth exponent.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numerical
//! error.

mod config;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dichotomy_core::sweep::{
    initial_seed, write_median_csv, write_outliers_csv, write_probe_csv, write_probe_k_csv,
    write_results_csv, write_summary_csv,
};
use dichotomy_core::{
    delta_probe, generate, run_sweep_with, IntervalScheme, SweepOptions, SweepOutcome, SweepResults,
};

use config::{parse_scheme, CliConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] dichotomy_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use dichotomy_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::InvalidConfig { .. } | E::Checkpoint { .. }) => 2,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) | CliError::Io { .. } => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "dichotomy",
    version,
    about = "Regular/chaotic dichotomy test for parameter families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full sweep: results, summary and outlier CSVs.
    Sweep(Common),
    /// Log-log curves of D(n) with regression cut-offs for choosing delta.
    ProbeDelta(ProbeArgs),
    /// Median K per parameter and data length.
    Median(Common),
    /// Percentage of undecided frequencies per parameter and data length.
    Outliers(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Scheme for outlier tables (default ii).
    #[arg(long, value_parser = ["i", "ii", "iii"])]
    scheme: Option<String>,
    #[arg(long = "N-list", value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    #[arg(long)]
    delta: Option<f64>,
    /// Resume from and save progress to this file.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Print the effective configuration and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Args)]
struct ProbeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long = "delta-list", value_delimiter = ',')]
    delta_list: Option<Vec<f64>>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn load(common: &Common, probe: bool) -> Result<CliConfig, CliError> {
    let text = fs::read_to_string(&common.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", common.config.display())))?;
    let mut cfg = config::parse(&text)?;
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
    }
    if let Some(seed) = common.seed {
        cfg.sweep.master_seed = seed;
    }
    if let Some(list) = &common.n_list {
        if probe {
            cfg.probe.n_list = list.clone();
        } else {
            cfg.sweep.n_list = list.clone();
        }
    }
    if let Some(delta) = common.delta {
        cfg.sweep.delta = delta;
    }
    if common.threads == Some(0) {
        return Err(CliError::Config("threads: must be at least 1".into()));
    }
    Ok(cfg)
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Sweep(common) => {
            let Some((cfg, results)) = sweep(&common)? else {
                return Ok(());
            };
            let scheme = outlier_scheme(&common)?;
            write_csv(&cfg.out_dir, "results.csv", |w| {
                write_results_csv(w, &results)
            })?;
            write_csv(&cfg.out_dir, "summary.csv", |w| {
                write_summary_csv(w, &results)
            })?;
            write_csv(&cfg.out_dir, "outliers.csv", |w| {
                write_outliers_csv(w, &results, &scheme)
            })
        }
        Command::Median(common) => {
            let Some((cfg, results)) = sweep(&common)? else {
                return Ok(());
            };
            write_csv(&cfg.out_dir, "median.csv", |w| {
                write_median_csv(w, &results)
            })
        }
        Command::Outliers(common) => {
            let Some((cfg, results)) = sweep(&common)? else {
                return Ok(());
            };
            let scheme = outlier_scheme(&common)?;
            write_csv(&cfg.out_dir, "outliers.csv", |w| {
                write_outliers_csv(w, &results, &scheme)
            })
        }
        Command::ProbeDelta(args) => probe(args),
    }
}

fn outlier_scheme(common: &Common) -> Result<IntervalScheme, CliError> {
    parse_scheme(common.scheme.as_deref().unwrap_or("ii"))
}

/// Runs the configured sweep; `None` when only the configuration was printed.
fn sweep(common: &Common) -> Result<Option<(CliConfig, SweepResults)>, CliError> {
    let cfg = load(common, false)?;
    if common.print_config {
        print!("{}", cfg.to_text());
        return Ok(None);
    }
    cfg.validate()?;
    let options = SweepOptions {
        threads: common.threads,
        checkpoint: common.checkpoint.clone(),
        unit_limit: None,
    };
    log::info!(
        "{} sweep: {} parameters, {} frequencies, N = {:?}",
        cfg.sweep.system.kind.name(),
        cfg.sweep.parameter_grid().len(),
        cfg.sweep.n_omega,
        cfg.sweep.n_list
    );
    match run_sweep_with(&cfg.sweep, &options)? {
        SweepOutcome::Complete(results) => Ok(Some((cfg, results))),
        SweepOutcome::Interrupted { completed, total } => Err(CliError::Config(format!(
            "sweep stopped after {completed} of {total} units"
        ))),
    }
}

fn probe(args: ProbeArgs) -> Result<(), CliError> {
    let mut cfg = load(&args.common, true)?;
    if let Some(a) = args.a {
        cfg.probe.a = a;
    }
    if let Some(omega) = args.omega {
        cfg.probe.omega = omega;
    }
    if let Some(list) = args.delta_list {
        cfg.probe.delta_list = list;
    }
    if args.common.print_config {
        print!("{}", cfg.to_text());
        return Ok(());
    }
    cfg.probe.validate()?;
    let p = &cfg.probe;
    let spec = cfg.sweep.system.with_a(p.a);
    spec.validate()
        .map_err(|e| CliError::Config(format!("probe.a: {e}")))?;
    let longest = p.n_list.iter().copied().max().unwrap_or(0);
    log::info!(
        "{} probe: a = {}, omega = {}, N = {:?}, delta = {:?}",
        spec.kind.name(),
        p.a,
        p.omega,
        p.n_list,
        p.delta_list
    );
    let series = generate(&spec, initial_seed(&cfg.sweep), longest)?;
    let result = delta_probe(series.values(), p.omega, &p.n_list, &p.delta_list)?;
    write_csv(&cfg.out_dir, "probe.csv", |w| write_probe_csv(w, &result))?;
    write_csv(&cfg.out_dir, "probe_k.csv", |w| {
        write_probe_k_csv(w, &result)
    })
}

fn write_csv(
    dir: &Path,
    name: &str,
    f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<(), CliError> {
    let path = dir.join(name);
    let io = |source| CliError::Io {
        path: path.clone(),
        source,
    };
    fs::create_dir_all(dir).map_err(io)?;
    let mut w = BufWriter::new(File::create(&path).map_err(io)?);
    f(&mut w).and_then(|()| w.flush()).map_err(io)?;
    log::info!("wrote {}", path.display());
    Ok(())
}
