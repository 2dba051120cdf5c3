use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use morrey_core::solver::{Init, Method};

#[derive(Debug, Parser)]
#[command(name = "morrey", version, about = "Generalized Morrey seminorms, extremals and sharp constants")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form extremal, sharp constant and far-field limits on the line.
    Extremal1d {
        #[command(flatten)]
        problem: Problem,
        /// CSV only: write this many uniform samples over the support padded
        /// by a quarter of its width instead of the breakpoints.
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Sharp constant: exact for n = 1, grid estimate with a duality value for n >= 2.
    Constant {
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Seminorm of a sampled field; `--format csv` emits the search trace.
    Seminorm {
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        field: FieldArg,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Grid extremal with residual, bound, symmetry and far-field reports.
    Solve {
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        solver: SolverArgs,
        /// Also write the extremal as `x,y[,z],u` CSV.
        #[arg(long)]
        field_out: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Both sides of the stability inequality for a sampled field.
    Stability {
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        field: FieldArg,
        /// Constant used in the inequality; defaults to the computed C*.
        #[arg(long)]
        c: Option<f64>,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Flux norm, primal value and divergence defect of the extremal.
    Duality {
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Run the invariant suite over a measure; exits 1 if any check fails.
    Verify {
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args)]
pub struct Problem {
    /// Measure JSON: `{"dim": n, "atoms": [{"y": [..], "w": ..}]}`.
    #[arg(long)]
    pub measure: PathBuf,
    /// Exponent, must exceed the dimension.
    #[arg(long)]
    pub p: f64,
}

#[derive(Debug, Args)]
pub struct FieldArg {
    /// Field CSV with header `x[,y[,z]],u`; 1D samples are joined linearly,
    /// higher-dimensional samples must fill a square grid.
    #[arg(long)]
    pub field: PathBuf,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 33)]
    pub scale_samples: usize,
    #[arg(long, default_value_t = 9)]
    pub shift_samples: usize,
    /// Orientation samples per chart coordinate.
    #[arg(long)]
    pub orientations: Option<usize>,
    #[arg(long, default_value_t = 8)]
    pub polish_starts: usize,
    /// Nelder-Mead stopping tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Half-width L of the box [-L, L]^n; defaults to three support radii.
    #[arg(long = "box")]
    pub half_width: Option<f64>,
    /// Nodes per axis.
    #[arg(long, default_value_t = 97)]
    pub res: usize,
    /// Target Euler-Lagrange residual.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 200_000)]
    pub max_iter: usize,
    /// Seed for `--init random`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = MethodArg::NewtonCg)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value_t = InitArg::Poisson)]
    pub init: InitArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    NewtonCg,
    GradientDescent,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::NewtonCg => Method::NewtonCg,
            MethodArg::GradientDescent => Method::GradientDescent,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InitArg {
    Poisson,
    SmoothedSplat,
    Random,
}

impl From<InitArg> for Init {
    fn from(i: InitArg) -> Init {
        match i {
            InitArg::Poisson => Init::Poisson,
            InitArg::SmoothedSplat => Init::SmoothedSplat,
            InitArg::Random => Init::Random,
        }
    }
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}
