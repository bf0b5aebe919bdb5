use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pitoom::harness::{run_scenario, Command};
use pitoom::storage::{load_config, RunConfig};
use pitoom::{par, Error};

#[derive(Parser)]
#[command(name = "pitoom", version, about = "Toom-family PCA and Floquet-Langevin experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Run the discrete PCA and write its magnetization series.
    PcaRun(Common),
    /// Run the oscillator lattice and write stroboscopic reads.
    LangevinRun(Common),
    /// Order parameter against error rate or temperature.
    PhaseScan(Common),
    /// Measured error rate per rule against the equilibrium estimate.
    ErrorBench(Common),
    /// Box cumulants of the error field and their size scaling.
    Cumulants(Common),
    /// Connected space-time correlations of errors.
    Correlations(Common),
    /// Empirical scaled cumulant generating functions.
    Scgf(Common),
    /// Dense oscillator trace while a single error is corrected.
    CorrectTrace(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Shrink budgets to the quick tier.
    #[arg(long)]
    quick: bool,
    /// Worker threads (parallel builds only).
    #[arg(long)]
    threads: Option<usize>,
}

impl Sub {
    fn split(&self) -> (Command, &Common) {
        match self {
            Sub::PcaRun(c) => (Command::PcaRun, c),
            Sub::LangevinRun(c) => (Command::LangevinRun, c),
            Sub::PhaseScan(c) => (Command::PhaseScan, c),
            Sub::ErrorBench(c) => (Command::ErrorBench, c),
            Sub::Cumulants(c) => (Command::Cumulants, c),
            Sub::Correlations(c) => (Command::Correlations, c),
            Sub::Scgf(c) => (Command::Scgf, c),
            Sub::CorrectTrace(c) => (Command::CorrectTrace, c),
        }
    }
}

fn resolve(common: &Common) -> Result<RunConfig, Error> {
    let mut cfg = match &common.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if common.quick {
        cfg = cfg.quick();
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out = out.clone();
    }
    let path = common.config.clone().unwrap_or_else(|| "<defaults>".into());
    cfg.validate().map_err(|message| Error::Config { path, message })?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = cli.command.split();
    let cfg = match resolve(common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(n) = common.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(1);
        }
        if !par::set_threads(n) {
            eprintln!("warning: --threads {n} ignored (sequential build or pool already set)");
        }
    }
    match run_scenario(command, &cfg) {
        Ok(summary) => {
            for f in &summary.files {
                println!("{}", cfg.out.join(f).display());
            }
            if summary.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                for f in &summary.failures {
                    eprintln!("failed: {}: {}", f.point, f.error);
                }
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
