//! `qmix`: sample random bipartite mixed states and tabulate their mixedness.
//!
//! Exit codes: 0 on success, 2 on invalid configuration, 3 on runtime failure.

mod commands;
mod config;
mod csv;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Command, Overrides, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "qmix", version, about = "Random mixed states and the distribution of their mixedness")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Histogram of the participation ratio R = 1/Tr ρ² against its closed form.
    DistR(Common),
    /// Histogram of the largest eigenvalue against its closed form.
    DistLmax(Common),
    /// PPT and entropic-violation probabilities over a Dirichlet η sweep.
    Psep(Common),
    /// R* = 1/⟨Tr ρ²⟩ against the empirical ⟨R⟩ over an η sweep.
    Rstar(Common),
    /// Borel ball radius and mixedness ratio over an N sweep.
    Borel(Common),
    /// Raw spectra, optionally with the full density matrices.
    Sample(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Total dimension N (with --dims, must equal A·B).
    #[arg(long)]
    n: Option<usize>,
    /// Bipartition as AxB.
    #[arg(long)]
    dims: Option<String>,
    /// uniform | dirichlet:<eta> | dirichlet-weights:<a,b,..> | fixed-r:<R>[:naive|theta]
    #[arg(long)]
    measure: Option<String>,
    /// Number of draws M.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Significance level of confidence intervals.
    #[arg(long)]
    alpha: Option<f64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Output CSV path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// File of `key = value` lines; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated Dirichlet parameters for psep and rstar.
    #[arg(long)]
    etas: Option<String>,
    /// Comma-separated dimensions for borel.
    #[arg(long)]
    ns: Option<String>,
    /// Also write density-matrix entries (sample).
    #[arg(long)]
    states: bool,
}

impl Common {
    fn overrides(&self) -> Result<Overrides, CliError> {
        let file = match &self.config {
            Some(p) => Overrides::from_file(p)?,
            None => Overrides::default(),
        };
        let flags = Overrides {
            n: self.n,
            dims: self.dims.clone(),
            measure: self.measure.clone(),
            samples: self.samples,
            bins: self.bins,
            seed: self.seed,
            alpha: self.alpha,
            threads: self.threads,
            out: self.out.clone(),
            etas: self.etas.clone(),
            ns: self.ns.clone(),
            states: self.states.then_some(true),
        };
        Ok(file.layered(flags))
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (command, common) = match &cli.command {
        Cmd::DistR(c) => (Command::DistR, c),
        Cmd::DistLmax(c) => (Command::DistLmax, c),
        Cmd::Psep(c) => (Command::Psep, c),
        Cmd::Rstar(c) => (Command::Rstar, c),
        Cmd::Borel(c) => (Command::Borel, c),
        Cmd::Sample(c) => (Command::Sample, c),
    };
    let cfg = RunConfig::resolve(command, common.overrides()?)?;
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    }
    match &cfg.out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", path.display())))?;
            commands::run(&cfg, BufWriter::new(file))?;
        }
        None => {
            let stdout = io::stdout();
            let mut out = commands::run(&cfg, BufWriter::new(stdout.lock()))?;
            out.flush().map_err(|e| CliError::Runtime(e.to_string()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qmix: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
