//! `tcube`: batch front end for cubic-matrix products, analytic functions,
//! spectra, simulation, the supply-chain game and hypergraph duals.
//!
//! Exit codes: 0 success, 2 usage or unreadable input, 3 domain or shape
//! error, 4 numeric non-convergence. Logging is controlled by `TCUBE_LOG`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tcube::ProductKind;

mod commands;
mod error;

use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "tcube", version, about = "Cubic-matrix algebra from the command line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Tprod,
    Dkstp,
    Tstp,
}

impl From<KindArg> for ProductKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Tprod => ProductKind::TProduct,
            KindArg::Dkstp => ProductKind::DkStp,
            KindArg::Tstp => ProductKind::TStp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeriesArg {
    Exp,
    Sin,
    Cos,
    Cosh,
    Sinh,
    Log1p,
    Binomial,
}

impl SeriesArg {
    fn name(self) -> &'static str {
        match self {
            SeriesArg::Exp => "exp",
            SeriesArg::Sin => "sin",
            SeriesArg::Cos => "cos",
            SeriesArg::Cosh => "cosh",
            SeriesArg::Sinh => "sinh",
            SeriesArg::Log1p => "log1p",
            SeriesArg::Binomial => "binomial",
        }
    }
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SeriesOpts {
    /// Coefficients kept past the constant term, and the summation cap.
    #[arg(long, default_value_t = 64)]
    terms: usize,
    /// Stop once a term's norm falls below this.
    #[arg(long, default_value_t = 1e-14)]
    atol: f64,
}

#[derive(Debug, Args)]
struct GameArgs {
    /// `default` or a GameConfig JSON file.
    #[arg(long, default_value = "default")]
    config: String,
    /// Profile transition matrix.
    #[arg(long = "A", value_name = "FILE")]
    a: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Product of two cubic matrices.
    Product {
        #[arg(long, value_enum)]
        kind: KindArg,
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Analytic function of a cubic matrix.
    Func {
        #[arg(long, value_enum)]
        series: SeriesArg,
        /// Exponent of the binomial series.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, value_enum, default_value = "tstp")]
        kind: KindArg,
        /// Also evaluate on Γ(A) and require a block-circulant result.
        #[arg(long)]
        strict_gamma: bool,
        #[command(flatten)]
        opts: SeriesOpts,
        a: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// t-eigenvalues and eigenvectors.
    Eig {
        a: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Characteristic polynomial of Γ(A), ascending coefficients.
    Charpoly {
        a: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Simulate one or more system documents.
    Sim {
        #[arg(required = true)]
        systems: Vec<PathBuf>,
        /// Horizon of a discrete system.
        #[arg(long)]
        steps: Option<usize>,
        /// Horizon of a continuous system.
        #[arg(long)]
        t_final: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[command(flatten)]
        opts: SeriesOpts,
        /// Trajectory CSV (single system only).
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Worker threads for independent systems.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Iterate the profile dynamics from one or more initial profiles.
    GameEvolve {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long = "B", value_name = "FILE", requires = "f")]
        b: Option<PathBuf>,
        /// State feedback, applied as u = F ⋉ W.
        #[arg(long = "F", value_name = "FILE", requires = "b")]
        f: Option<PathBuf>,
        #[arg(long, required = true, num_args = 1..)]
        w0: Vec<PathBuf>,
        #[arg(long)]
        steps: usize,
        /// Use W ↦ W ⋉ W + A ⋉ W instead of the linear map.
        #[arg(long, conflicts_with = "b")]
        nonlinear: bool,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Solve A + B ⋉ F = target for a feedback F.
    GameSynthesize {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long = "B", value_name = "FILE")]
        b: PathBuf,
        #[arg(long, value_name = "FILE")]
        target: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Find the preperiod and period of a profile orbit.
    GameCycle {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        w0: PathBuf,
        /// Step budget.
        #[arg(long, default_value_t = 1_000_000)]
        steps: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Dual of a hypergraph file, or of the supply chain built from --config.
    HyperDual {
        #[arg(required_unless_present = "config", conflicts_with = "config")]
        hypergraph: Option<PathBuf>,
        #[arg(long)]
        config: Option<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check documents; with --self-check also run seeded algebra checks.
    Validate {
        files: Vec<PathBuf>,
        #[arg(long)]
        self_check: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("TCUBE_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

fn main() -> ExitCode {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Rejects `--out` targets that would overwrite an input.
fn check_not_input(out: Option<&PathBuf>, inputs: &[&PathBuf]) -> Result<(), CliError> {
    let Some(out) = out else { return Ok(()) };
    let same = |p: &PathBuf| match (out.canonicalize(), p.canonicalize()) {
        (Ok(a), Ok(b)) => a == b,
        _ => out == p,
    };
    match inputs.iter().find(|p| same(p)) {
        Some(p) => Err(CliError::Usage(format!("output {} would overwrite an input", p.display()))),
        None => Ok(()),
    }
}
