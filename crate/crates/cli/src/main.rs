//! `ncg` — command-line interface for the noncommutative graph toolkit.
//!
//! Subcommands wire file-based JSON inputs through the core library:
//! `build` normalizes graphs/channels/matrix lists into operator systems,
//! `search` looks for quantum cliques/anticliques, `construct` runs one of
//! the certified constructions, `probe` runs the finite-scale trichotomy
//! probe, and `verify-kl`/`find-code` cover the error-correction surface.
//!
//! Exit codes: 0 success or witness found, 2 parse error, 3 invariant
//! violation, 4 no witness, 5 scale limit reached.

mod commands;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ncg_core::Tolerance;

#[derive(Parser)]
#[command(name = "ncg", version, about = "finite-truncation noncommutative graph toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    /// span{I, edge units}
    PaperLiteral,
    /// additionally all diagonal units
    Reflexive,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchMode {
    Clique,
    Anticlique,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructionKind {
    /// dilation isometry: V*(A ⊕ 0)V = T
    Dilation,
    /// spanning family T_1..T_m² for M_m
    Spanning,
    /// greedy reduction to a diagonal compression
    ReduceDiag,
    /// diagonal combination from block-plus-diagonal inputs
    Corners,
    /// pivoted triangularization of commuting diagonals
    Triangularize,
    /// γ-coefficient clique certificate with 1/m bounds
    CliqueCert,
    /// densest eps-cluster selection on commuting diagonals
    Cluster,
}

#[derive(clap::Args)]
struct CommonOpts {
    /// Relative singular-value cutoff for rank decisions
    #[arg(long, default_value_t = 1e-9)]
    tol_rank: f64,
    /// Absolute operator-norm residual bound
    #[arg(long, default_value_t = 1e-8)]
    tol_res: f64,
    /// RNG seed (the NCG_SEED environment variable overrides this)
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Search restarts
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize a graph, channel or matrix-list JSON file into an operator system
    Build {
        /// Input JSON: a graph {vertex_count, edges}, a channel
        /// {in_dim, out_dim, kraus} or matrices {d, basis}
        #[arg(long)]
        input: std::path::PathBuf,
        #[arg(long, value_enum, default_value_t = ConventionArg::PaperLiteral)]
        convention: ConventionArg,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Search an operator system for a quantum clique or anticlique
    Search {
        /// Operator system JSON
        #[arg(long)]
        system: std::path::PathBuf,
        #[arg(long, value_enum)]
        mode: SearchMode,
        /// Projection rank to search for
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run one certified construction on parameters supplied as JSON
    Construct {
        #[arg(value_enum, value_name = "CONSTRUCTION")]
        construction: ConstructionKind,
        /// Parameter file; schema depends on the construction (see schemas/)
        #[arg(long)]
        params: std::path::PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Probe the clique/anticlique/obstruction trichotomy over growing truncations
    Probe {
        /// Fixture kind: weaver_example, trace_example, compact_k_example, full_algebra
        #[arg(long)]
        fixture: String,
        /// Comma-separated truncation dimensions, at least three
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Verify the Knill-Laflamme condition for a channel and a projection
    VerifyKl {
        #[arg(long)]
        channel: std::path::PathBuf,
        #[arg(long)]
        projection: std::path::PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Search a channel for an error-correcting code of the given dimension
    FindCode {
        #[arg(long)]
        channel: std::path::PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Build { input, convention, common } => {
            commands::build(&input, convention, &common)
        }
        Command::Search { system, mode, k, common } => {
            commands::search(&system, mode, k, &common)
        }
        Command::Construct { construction, params, common } => {
            commands::construct(construction, &params, &common)
        }
        Command::Probe { fixture, dims, common } => commands::probe(&fixture, &dims, &common),
        Command::VerifyKl { channel, projection, common } => {
            commands::verify_kl(&channel, &projection, &common)
        }
        Command::FindCode { channel, k, common } => commands::find_code(&channel, k, &common),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("ncg: {}", err.message);
            ExitCode::from(err.exit_code)
        }
    }
}

pub(crate) struct CliError {
    pub message: String,
    pub exit_code: u8,
}

impl CliError {
    fn parse(message: impl Into<String>) -> Self {
        CliError { message: message.into(), exit_code: 2 }
    }
}

impl From<ncg_core::Error> for CliError {
    fn from(err: ncg_core::Error) -> Self {
        let exit_code = if err.is_scale_limit() { 5 } else { 3 };
        CliError { message: err.to_string(), exit_code }
    }
}

impl CommonOpts {
    /// Tolerance from the flags; invalid combinations exit 3.
    fn tolerance(&self) -> Result<Tolerance, CliError> {
        Ok(Tolerance::new(self.tol_rank, self.tol_res)?)
    }

    /// Seed with the NCG_SEED override applied.
    fn effective_seed(&self) -> Result<u64, CliError> {
        match std::env::var("NCG_SEED") {
            Ok(raw) => raw
                .parse::<u64>()
                .map_err(|_| CliError::parse(format!("NCG_SEED is not a u64: {raw:?}"))),
            Err(_) => Ok(self.seed),
        }
    }
}
