//! `qadv` — certify adversary lower bounds for read-once AND/OR formulas
//! and trace query algorithms against the progress-measure inequalities.
//!
//! Exit codes: 0 when the command ran and every assertion passed, 2 when a
//! numerical assertion failed (for example an FOC residual over tolerance),
//! 1 on usage, parse, or input errors.

mod commands;
mod report;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "qadv", version, about = "Adversary lower bounds for read-once formulas")]
pub struct Cli {
    /// Render a human summary instead of JSON.
    #[arg(long, global = true)]
    pub table: bool,

    /// Reserved for future randomized extensions; accepted and ignored.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Enumerate critical inputs and the neighbor relation.
    Critical {
        /// Read-once formula, e.g. "(x1|x2)&(x3|x4)".
        formula: String,
        /// Print set sizes only.
        #[arg(long)]
        counts: bool,
        /// Cap on |X| + |Y|.
        #[arg(long, default_value_t = 1 << 20)]
        max_critical: usize,
    },
    /// Evaluate the adversary bound, either for the constructed amplitude
    /// vector or for weights and amplitudes supplied in files.
    Bound {
        formula: String,
        /// Permitted error probability, in (0, 1/2).
        #[arg(long)]
        epsilon: f64,
        /// Weight file: one `zero_bits,one_bits weight` per line, `#` comments.
        #[arg(long, requires = "alpha")]
        gamma: Option<PathBuf>,
        /// Amplitude file: one `bits value` per line, `#` comments.
        #[arg(long, requires = "gamma")]
        alpha: Option<PathBuf>,
        #[arg(long, default_value_t = 1 << 20)]
        max_critical: usize,
    },
    /// Construct the amplitude vector and check the first-order conditions,
    /// the mass split, and the spectral oracle.
    VerifyFoc {
        formula: String,
        /// Largest admissible FOC residual.
        #[arg(long, default_value_t = 1e-10)]
        foc_tol: f64,
        /// Admissible |lambda - sqrt(n)| for the oracle eigenvalue.
        #[arg(long, default_value_t = 1e-8)]
        eigen_tol: f64,
        /// Admissible entrywise eigenvector deviation (connected graphs).
        #[arg(long, default_value_t = 1e-6)]
        entry_tol: f64,
        #[arg(long, default_value_t = 1 << 20)]
        max_critical: usize,
    },
    /// Compare the constructed amplitudes against power iteration only.
    OracleCheck {
        formula: String,
        #[arg(long, default_value_t = 1e-8)]
        eigen_tol: f64,
        #[arg(long, default_value_t = 1e-6)]
        entry_tol: f64,
        #[arg(long, default_value_t = 1 << 20)]
        max_critical: usize,
    },
    /// Run a built-in query algorithm and trace the progress measure.
    Simulate {
        builtin: Builtin,
        /// Input length; required for grover-or and identity.
        #[arg(long)]
        n: Option<u32>,
        /// Grover phase iterations (grover-or) or null steps (identity).
        #[arg(long)]
        iters: Option<usize>,
        /// Formula whose critical structure supplies the tracked inputs,
        /// weights, and amplitudes; defaults to the n-variable OR.
        #[arg(long)]
        formula: Option<String>,
        /// Requested error probability for the secondary overlap verdict.
        #[arg(long)]
        epsilon: f64,
        /// Track all 2^n inputs (n <= 8) instead of the critical inputs.
        #[arg(long)]
        all_inputs: bool,
        #[arg(long, default_value_t = 1 << 20)]
        max_critical: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    Xor2,
    GroverOr,
    Identity,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::Xor2 => "xor2",
            Builtin::GroverOr => "grover-or",
            Builtin::Identity => "identity",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(qadv_core::Error),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<qadv_core::Error> for CliError {
    fn from(e: qadv_core::Error) -> Self {
        CliError::Core(e)
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                print!("{e}");
                std::process::exit(0);
            }
            _ => {
                eprint!("{e}");
                std::process::exit(1);
            }
        },
    };

    match commands::execute(&cli.command) {
        Ok(report) => {
            if cli.table {
                print!("{}", report::render_table(&report));
            } else {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                );
            }
            std::process::exit(if report.assertions_passed { 0 } else { 2 });
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
