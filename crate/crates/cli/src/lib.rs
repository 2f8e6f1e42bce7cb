//! The `raz` command line: extraction on files, parameter calculation,
//! benchmarking and a self-test.
//!
//! Exit codes: 0 success, 1 I/O or self-test failure, 2 invalid arguments,
//! 3 no trinomial for the requested `n1 / 2`.

use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod bench;
pub mod calc;
pub mod extract;
pub mod io;
pub mod selftest;

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;

/// An error together with the process exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_FAILURE,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<raz_core::Error> for Failure {
    fn from(e: raz_core::Error) -> Self {
        use raz_core::Error as E;
        let code = match e {
            E::UnsupportedDegree(_) | E::UnsupportedLength(..) => EXIT_UNSUPPORTED,
            _ => EXIT_USAGE,
        };
        let message = match e {
            E::UnsupportedDegree(s) => format!("unsupported n1 = {}: {e}", 2 * s),
            other => other.to_string(),
        };
        Failure { code, message }
    }
}

#[derive(Debug, Parser)]
#[command(name = "raz", version, about = "Two-source randomness extraction over GF(2^s)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract m bits from two source files.
    Extract(extract::ExtractArgs),
    /// Compute error bounds and optimized parameters.
    Params(calc::ParamsArgs),
    /// Time extraction across input sizes and print CSV.
    Bench(bench::BenchArgs),
    /// Run the built-in oracle and exhaustive checks.
    Selftest(selftest::SelftestArgs),
}

/// Optional replacement for the bundled trinomial table.
#[derive(Debug, Clone, clap::Args)]
pub struct TableArg {
    /// Trinomial table file ("s k" per line) used instead of the bundled one.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

impl TableArg {
    pub fn load(&self) -> Result<Option<raz_core::gf2x::TrinomialTable>, Failure> {
        let Some(path) = &self.table else {
            return Ok(None);
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::io(format!("cannot read table {}: {e}", path.display())))?;
        raz_core::gf2x::TrinomialTable::parse(&text)
            .map(Some)
            .map_err(Failure::from)
    }
}

/// Runs a parsed command line, printing diagnostics to stderr; returns the
/// exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Extract(a) => extract::run_extract(&a),
        Command::Params(a) => calc::run_params(&a),
        Command::Bench(a) => bench::run_bench(&a),
        Command::Selftest(a) => selftest::run_selftest(&a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {f}");
            f.code
        }
    }
}
