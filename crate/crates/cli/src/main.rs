//! `motzkin`: command-line front end for the free Motzkin chain.
//!
//! Exit codes: 0 when every check passed, 1 when a check failed (the
//! report is still written), 2 on a usage error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::{emit, CliError, Format};

#[derive(Parser)]
#[command(name = "motzkin", version, about = "Free Motzkin spin chain: spectra, algebra checks, Bethe ansatz")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone)]
pub struct Chain {
    /// Number of links.
    #[arg(short = 'L', long)]
    pub length: usize,
    /// Flat-move coupling as "p/q".
    #[arg(long, default_value = "0", value_parser = parse_q)]
    pub epsilon: motzkin_core::Q,
}

fn parse_q(s: &str) -> Result<motzkin_core::Q, String> {
    motzkin_core::exact::parse_rational(s).map_err(|e| e.to_string())
}

fn parse_tol(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
        _ => Err(format!("tolerance must be a positive number, got {s:?}")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues by conserved block.
    Spectrum {
        #[command(flatten)]
        chain: Chain,
        /// Restrict to one sector, "u,d" (needs epsilon 0).
        #[arg(long)]
        sector: Option<motzkin_core::SectorLabel>,
        /// Zero tolerance for kernel counting and the PSD check.
        #[arg(long, default_value = "1e-10", value_parser = parse_tol)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Ground-state count by construction, checked against ED.
    Gsd {
        #[arg(short = 'L', long)]
        length: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Exact operator-algebra checks.
    Algebra {
        #[command(subcommand)]
        which: AlgebraCommand,
    },
    /// Coordinate Bethe ansatz.
    Bethe {
        #[command(subcommand)]
        which: BetheCommand,
    },
    /// Compare with the spin-1/2 XXX chain.
    CompareXxx {
        #[arg(short = 'L', long)]
        length: usize,
        #[arg(long, default_value = "1e-9", value_parser = parse_tol)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Equivalence-move orbits and explicit ground states.
    Paths {
        #[command(subcommand)]
        which: PathsCommand,
    },
    /// Audit the (1,1)-sector operator action table.
    ActionTable {
        #[arg(short = 'L', long, default_value_t = 6)]
        length: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
pub enum AlgebraCommand {
    /// Periodic Temperley-Lieb relations.
    Ptl {
        #[arg(short = 'L', long)]
        length: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Flat-move relations and their interchanged family.
    Flat {
        #[arg(short = 'L', long)]
        length: usize,
        #[command(flatten)]
        common: Common,
    },
    /// The two S21 composition tables.
    S21 {
        #[arg(short = 'L', long)]
        length: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Yang-Baxter equation at given or random spectral parameters.
    Ybe {
        #[arg(short = 'L', long, default_value_t = 3)]
        length: usize,
        #[arg(long, value_parser = parse_q, requires = "lambda2")]
        lambda1: Option<motzkin_core::Q>,
        #[arg(long, value_parser = parse_q, requires = "lambda1")]
        lambda2: Option<motzkin_core::Q>,
        /// Number of seeded random pairs (used when no lambdas are given).
        #[arg(long, default_value_t = 20)]
        random: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
pub enum BetheCommand {
    /// The L one-magnon solutions.
    One {
        #[arg(short = 'L', long)]
        length: usize,
        #[command(flatten)]
        common: Common,
    },
    /// The complete two-magnon solution list.
    Two {
        #[arg(short = 'L', long)]
        length: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Bethe wavefunction for given momenta and flavors.
    State {
        #[command(flatten)]
        input: StateInput,
        #[command(flatten)]
        common: Common,
    },
    /// Eigen-residual of the Bethe wavefunction.
    Residual {
        #[command(flatten)]
        input: StateInput,
        #[arg(long, default_value = "1e-8", value_parser = parse_tol)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone)]
pub struct StateInput {
    #[arg(short = 'L', long)]
    pub length: usize,
    /// Comma-separated momenta in radians; complex values as "a+bi".
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub momenta: Vec<num_complex::Complex64>,
    /// Flavor of each particle in position order, e.g. "ud".
    #[arg(long)]
    pub flavors: motzkin_core::FlavorWord,
}

#[derive(Subcommand)]
pub enum PathsCommand {
    /// Orbit of one configuration under the equivalence moves.
    Orbit {
        /// Configuration word over u, f, d.
        #[arg(long)]
        config: motzkin_core::ConfigWord,
        #[command(flatten)]
        common: Common,
    },
    /// Product and entangled ground states.
    GroundStates {
        #[arg(short = 'L', long)]
        length: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("usage error");
            eprintln!("{first}");
            return ExitCode::from(2);
        }
    };
    let (result, out) = commands::run(cli.command);
    let outcome = result.and_then(|report| emit(&report.body, out.as_ref()).map(|_| report.passed));
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
