//! `hup` — experiment runner for the parabola Fourier-uniqueness laboratory.
//!
//! Subcommands: `region`, `verify`, `counterexample`, `bootstrap`, `lambda`,
//! `eval`. Every run takes its parameters from flags, optionally overlaid on a
//! JSON config document (`--config`); the effective parameters are echoed to
//! `<out>/config.json` so a run can be reproduced from its output directory
//! alone. Outputs are deterministic: identical parameters give byte-identical
//! files.
//!
//! Exit codes: 0 all checks passed, 1 a numeric check failed, 2 malformed
//! input or I/O failure, 3 precondition violated.

mod commands;
mod svg;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "hup",
    version,
    about = "Fourier extensions of parabola measures: experiments and verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan the admissible exponent region, emit CSV and an SVG figure.
    Region(commands::region::RegionArgs),
    /// Run verification suites (route identity, PDE residual, H-identity,
    /// symmetry relations) against a measure document.
    Verify(commands::verify::VerifyArgs),
    /// Build the odd-bump non-uniqueness measure and check where its
    /// extension vanishes.
    Counterexample(commands::counterexample::CounterexampleArgs),
    /// Iterate the self-improving decay estimates and report the verdict.
    Bootstrap(commands::bootstrap::BootstrapArgs),
    /// Materialize (and optionally Moebius-map) a line-node specification.
    Lambda(commands::lambda::LambdaArgs),
    /// Evaluate the extension on a rectangular grid.
    Eval(commands::eval::EvalArgs),
}

/// Command-level failure carrying its process exit code.
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn numeric(msg: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: msg.into(),
        }
    }
    pub fn input(msg: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: msg.into(),
        }
    }
    pub fn precondition(msg: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: msg.into(),
        }
    }
}

impl From<hup_core::Error> for CliError {
    fn from(e: hup_core::Error) -> Self {
        use hup_core::Error::*;
        let code = match &e {
            NonConvergence { .. } | DegenerateFit => 1,
            InvalidInput(_) => 2,
            Domain(_) | Spec(_) | Pole { .. } | DegenerateEta { .. } | Unsupported(_) => 3,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::input(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::input(format!("json error: {e}"))
    }
}

fn main() {
    // HUP_THREADS caps intra-command parallelism.
    if let Ok(v) = std::env::var("HUP_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Region(args) => commands::region::run(args),
        Command::Verify(args) => commands::verify::run(args),
        Command::Counterexample(args) => commands::counterexample::run(args),
        Command::Bootstrap(args) => commands::bootstrap::run(args),
        Command::Lambda(args) => commands::lambda::run(args),
        Command::Eval(args) => commands::eval::run(args),
    };
    if let Err(e) = result {
        eprintln!("hup: {}", e.message);
        std::process::exit(e.code);
    }
}
