//! `qsymx`: command-line verification of U_q(g) module identities.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qsymx::cartan::CartanType;

use crate::commands::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "qsymx",
    version,
    about = "Verify identities for U_q(g)-modules at real q > 0"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub opts: Options,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Options {
    /// Cartan type.
    #[arg(long = "type", global = true, default_value = "A1", value_parser = parse_type)]
    pub cartan_type: CartanType,

    /// Highest weight in fundamental-weight coordinates, e.g. `3` or `1,0`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub hw: Option<String>,

    /// Direct sum of simple modules, e.g. `1,0;0,1`.
    #[arg(long, global = true, conflicts_with = "hw", allow_hyphen_values = true)]
    pub summands: Option<String>,

    /// Deformation parameter.
    #[arg(long, global = true, default_value_t = 1.2)]
    pub q: f64,

    /// Tensor degree.
    #[arg(long, global = true, default_value_t = 3)]
    pub n: usize,

    /// Numerical rank tolerance.
    #[arg(long, global = true, env = "QSYMX_TOL", default_value_t = 1e-9)]
    pub tol: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Write the report to a file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Build a module and check the defining relations.
    Module,
    /// Decompose V^{⊗n} into simple modules by two independent routes.
    Decompose,
    /// R-matrix and coboundary checks on V ⊗ V.
    Braiding,
    /// Cactus group relations on V^{⊗n}.
    Cactus,
    /// Quantum symmetric and exterior powers in degree n.
    Sympow,
    /// Compare dim S^k_q V and dim Λ^k_q V with the classical counts for k ≤ n.
    Flatness,
    /// Commutativity criterion on S^n_q V and its super variant on Λ^n_q V.
    Commutativity,
    /// The cube identity S³_q V − Λ³_q V = S³ V − Λ³ V.
    Cube,
    /// Hilbert series through degree 3 and the dimension count (dim V)².
    Koszul,
    /// Run the desk-scale verification suite.
    Suite,
}

fn parse_type(s: &str) -> Result<CartanType, String> {
    s.parse().map_err(|e: qsymx::error::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(pass) => ExitCode::from(if pass { 0 } else { 1 }),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(CliError::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let opts = &cli.opts;
    if !(opts.tol > 0.0 && opts.tol < 1e-6) {
        return Err(CliError::Usage(format!(
            "tolerance {} must lie in (0, 1e-6)",
            opts.tol
        )));
    }
    let report = commands::dispatch(cli.command, opts)?;
    let text = match opts.format {
        Format::Table => report.render_table(),
        Format::Json => report.render_json(),
        Format::Csv => report.render_csv().ok_or_else(|| {
            CliError::Usage("CSV output is available for sympow, flatness and koszul only".into())
        })?,
    };
    match &opts.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
    }
    Ok(report.passed())
}
