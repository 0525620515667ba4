//! `progdisc`: baselines, margin allocations, success curves and numerical
//! verification for programmable two-state discrimination with an error
//! margin.
//!
//! Exit status: 0 success, 1 usage error, 2 verification failure, 3 I/O error.

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use progdisc::MarginKind;

mod commands;
mod output;

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "progdisc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Unambiguous and minimum-error success probabilities and the global
    /// critical margin.
    Baselines(BaselinesArgs),
    /// Optimal success probability against the global margin, weak and strong.
    Curve(CurveArgs),
    /// Per-block margins of the optimal allocation at one global margin.
    Allocate(AllocateArgs),
    /// Cross-check the closed forms against independent numerical oracles.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, Args)]
struct Ports {
    /// Copies of each program state (ports A and C).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    /// Copies of the data state (port B).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    nprime: u32,
}

#[derive(Debug, Clone, Args)]
struct Sink {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file (standard output if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BaselinesArgs {
    #[command(flatten)]
    ports: Ports,
    #[command(flatten)]
    sink: Sink,
}

#[derive(Debug, Args)]
struct CurveArgs {
    #[command(flatten)]
    ports: Ports,
    /// Uniform samples on [0, 1.2 R_c]; every breakpoint is added on top.
    #[arg(long, default_value_t = 512, value_parser = parse_samples)]
    samples: usize,
    #[command(flatten)]
    sink: Sink,
}

#[derive(Debug, Args)]
struct AllocateArgs {
    #[command(flatten)]
    ports: Ports,
    /// Global error margin.
    #[arg(long = "R", value_parser = parse_margin)]
    r: f64,
    #[arg(long, default_value = "weak", value_parser = parse_kind)]
    kind: MarginKind,
    #[command(flatten)]
    sink: Sink,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    ports: Ports,
    /// Extra global weak margin for the Monte Carlo check.
    #[arg(long = "R", value_parser = parse_margin)]
    r: Option<f64>,
    /// Points of the margin grid for the allocation check.
    #[arg(long, default_value_t = 50, value_parser = parse_samples)]
    samples: usize,
    /// Seed of the Monte Carlo and random-margin generators.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Run the Monte Carlo check with this many sampled program pairs.
    #[arg(long)]
    trials: Option<usize>,
    /// Require the dense-matrix checks (they run by default whenever the
    /// configuration fits the qubit cap).
    #[arg(long)]
    dense: bool,
    /// Multiplies every tolerance; 0 turns any nonzero deviation into a
    /// failure, which exercises the FAIL path.
    #[arg(long, default_value_t = 1.0, value_parser = parse_scale)]
    tolerance_scale: f64,
    /// Report file (standard output if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_margin(s: &str) -> Result<f64, String> {
    let r: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&r) {
        Ok(r)
    } else {
        Err(format!("margin must lie in [0, 1], got {r}"))
    }
}

fn parse_samples(s: &str) -> Result<usize, String> {
    let k: usize = s.parse().map_err(|e| format!("{e}"))?;
    if k >= 2 {
        Ok(k)
    } else {
        Err(format!("at least 2 samples are required, got {k}"))
    }
}

fn parse_kind(s: &str) -> Result<MarginKind, String> {
    s.parse().map_err(|e: progdisc::Error| e.to_string())
}

fn parse_scale(s: &str) -> Result<f64, String> {
    let k: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if k >= 0.0 && k.is_finite() {
        Ok(k)
    } else {
        Err(format!(
            "tolerance scale must be finite and non-negative, got {k}"
        ))
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(io::Error),
    Verification,
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<progdisc::Error> for Failure {
    fn from(e: progdisc::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match cli.command {
        Command::Baselines(args) => commands::baselines(&args),
        Command::Curve(args) => commands::curve(&args),
        Command::Allocate(args) => commands::allocate(&args),
        Command::Verify(args) => commands::verify(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification) => ExitCode::from(2),
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
