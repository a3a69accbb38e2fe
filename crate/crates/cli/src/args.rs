use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "fock-radial",
    version,
    about = "Eigenvalues of radial Toeplitz operators and Laguerre-Gaussian symbol synthesis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Closed,
    Quad,
    Both,
}

#[derive(Debug, Args)]
pub struct OutputOpts {
    /// Output format for the main table.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write the table here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalue sequence γ_g(0..=n_max) of a symbol.
    Eigs {
        /// Symbol JSON file, or inline JSON.
        #[arg(long)]
        symbol: String,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
        #[arg(long, value_enum, default_value = "closed")]
        engine: EngineArg,
        /// Relative tolerance for the quadrature engine.
        #[arg(long)]
        rel_tol: Option<f64>,
        /// Subdivision budget per quadrature.
        #[arg(long)]
        max_subdivisions: Option<usize>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Build a symbol whose eigenvalues approximate a target within epsilon.
    Approximate {
        /// Target JSON file, inline JSON, or `generator:<kind>?…`.
        #[arg(long)]
        target: String,
        #[arg(long)]
        epsilon: f64,
        /// Where to write the plan JSON.
        #[arg(long)]
        plan_out: Option<PathBuf>,
        /// Override the scale chosen by the planner.
        #[arg(long)]
        xi: Option<u64>,
        /// Last index checked with closed forms (default max(4N, N+50)).
        #[arg(long)]
        n_verify: Option<usize>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Re-verify a plan file.
    Verify {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        n_verify: Option<usize>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Evaluate a symbol at points x >= 0.
    SymbolEval {
        #[arg(long)]
        symbol: String,
        /// Comma-separated evaluation points.
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<f64>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Vallée-Poussin smoothing of a target sequence.
    Smooth {
        #[arg(long)]
        target: String,
        #[arg(long)]
        delta: f64,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Windowed sequence-class diagnostics.
    Diagnose {
        #[arg(long)]
        target: String,
        /// Restrict to indices 0..=n_max.
        #[arg(long)]
        n_max: Option<usize>,
        #[command(flatten)]
        out: OutputOpts,
    },
}
