mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{Command, Overrides};

/// Dirac-equation solvers: convergence studies, stability scans and 2D runs.
#[derive(Debug, Parser)]
#[command(name = "dirac-lab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Run one (scheme, eps, h, tau) cell and record mass and energy over time.
    Solve(Common),
    /// Error and order table against a reference solution.
    Converge(Common),
    /// Blow-up scan at multiples of each scheme's step-size bound.
    Stability(Common),
    /// TSFP on the 2D honeycomb lattice with density snapshots.
    Honeycomb(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// JSON config file (nested or dotted keys); a previous manifest.json works too.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, short, default_value = "dirac-lab-out")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, env = "DIRAC_LAB_THREADS")]
    threads: Option<usize>,
    /// gaussian-1d | free-dirac | honeycomb-2d | custom
    #[arg(long)]
    preset: Option<String>,
    /// Comma-separated scheme names (lffd, sifd1, sifd2, cnfd, ewi-fp, tsfp).
    #[arg(long = "scheme")]
    schemes: Option<String>,
    /// Comma-separated eps values.
    #[arg(long)]
    eps: Option<String>,
    /// Comma-separated mesh sizes; fractions like 1/16 are accepted.
    #[arg(long)]
    h: Option<String>,
    /// Comma-separated time steps, or `auto` for 0.9 x the stability bound.
    #[arg(long)]
    tau: Option<String>,
    /// Final time.
    #[arg(long = "t-final")]
    t_final: Option<String>,
    /// Override any config field by dotted path, e.g. reference.h_e=1/64. Values are read as JSON,
    /// then as a number or fraction, then as a plain string.
    #[arg(long, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Leave the wall_time column of results.csv empty.
    #[arg(long)]
    no_timing: bool,
}

const EXIT_ERROR: u8 = 1;
const EXIT_BLOWUP: u8 = 2;
const EXIT_USAGE: u8 = 64;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let (command, args) = match cli.command {
        Cmd::Solve(a) => (Command::Solve, a),
        Cmd::Converge(a) => (Command::Converge, a),
        Cmd::Stability(a) => (Command::Stability, a),
        Cmd::Honeycomb(a) => (Command::Honeycomb, a),
    };
    if args.threads == Some(0) {
        eprintln!("error: --threads must be positive");
        return ExitCode::from(EXIT_USAGE);
    }
    let overrides = Overrides {
        preset: args.preset,
        schemes: args.schemes,
        eps: args.eps,
        h: args.h,
        tau: args.tau,
        t_final: args.t_final,
        set: args.set,
    };
    let spec = match config::resolve(command, args.config.as_deref(), &overrides) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let opts = run::Options { out: args.out, threads: args.threads, timing: !args.no_timing };
    match dirac_core::par::with_threads(args.threads, || run::execute(command, &spec, &opts)) {
        Ok(run::Outcome::Done) => ExitCode::SUCCESS,
        Ok(run::Outcome::BlowUp { step }) => {
            eprintln!("blow-up at step {step}");
            ExitCode::from(EXIT_BLOWUP)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
