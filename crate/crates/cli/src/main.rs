//! `qroc`: exact ROC curves, analytic bounds, asymptotic reports and
//! measurement sequences from JSON state documents.

mod commands;
mod failure;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use failure::Failure;

#[derive(Parser, Debug)]
#[command(name = "qroc", version, about = "ROC curves for discriminating two quantum states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct PlotArgs {
    /// Write an SVG plot of alpha against beta.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Logarithmic axes for the SVG plot.
    #[arg(long)]
    pub log: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact ROC curve of two density matrices.
    Exact {
        state1: PathBuf,
        state2: PathBuf,
        /// Number of p values on the Chebyshev grid.
        #[arg(long, default_value_t = 512)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        plot: PlotArgs,
    },
    /// Analytic bound curves (and the exact curve where available).
    Bounds {
        state1: PathBuf,
        /// Omitted when the first document is a pure-overlap pair.
        state2: Option<PathBuf>,
        /// Comma-separated list; defaults to every bound available for the input.
        #[arg(long, value_delimiter = ',')]
        bounds: Vec<String>,
        #[arg(long, default_value_t = 1)]
        copies: u32,
        /// Number of beta values.
        #[arg(long, default_value_t = 257)]
        grid: usize,
        /// Parameter of the constant bound; defaults to the Chernoff optimum.
        #[arg(long)]
        s0: Option<f64>,
        /// Fock cutoff per mode for the Gaussian fidelity estimate.
        #[arg(long)]
        cutoff: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        plot: PlotArgs,
    },
    /// Error exponents, Hoeffding saturation, Stein limits and log-convexity.
    Asymptotics {
        state1: PathBuf,
        state2: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        p_grid: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Three-copy combination rules and adaptive sequences on pure states.
    Sequence {
        #[arg(long, value_enum)]
        rule: RuleArg,
        #[arg(long, value_delimiter = ',', required = true)]
        fidelities: Vec<f64>,
        /// Single prior weight; sweeps an interior grid when omitted.
        #[arg(long)]
        p0: Option<f64>,
        #[arg(long, default_value_t = 99)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleArg {
    A,
    B,
    C,
    Adaptive,
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("QROC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::io(format!("QROC_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::io(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Exact { state1, state2, grid, out, plot } => commands::exact(&state1, &state2, grid, out.as_deref(), &plot),
        Command::Bounds { state1, state2, bounds, copies, grid, s0, cutoff, out, plot } => commands::bounds(
            commands::BoundsRequest {
                state1: &state1,
                state2: state2.as_deref(),
                bounds: &bounds,
                copies,
                grid,
                s0,
                cutoff,
            },
            out.as_deref(),
            &plot,
        ),
        Command::Asymptotics { state1, state2, p_grid, out } => {
            commands::asymptotics(&state1, state2.as_deref(), &p_grid, out.as_deref())
        }
        Command::Sequence { rule, fidelities, p0, grid, out } => commands::sequence(rule, &fidelities, p0, grid, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", serde_json::to_string(&f).unwrap_or_else(|_| f.message.clone()));
            ExitCode::from(f.exit_code as u8)
        }
    }
}
