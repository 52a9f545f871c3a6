use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "jetgeo")]
#[command(about = "Jet-space geometry (connection, torsion, Yang-Mills energy) of first-order ODE systems")]
#[command(version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Geometric objects at a point, as JSON
    Geometry {
        #[command(flatten)]
        source: SourceArgs,
        /// Point x1,...,xn
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Integrate the first-order system (or the Euler-Lagrange flow) with RK4
    Integrate {
        #[command(flatten)]
        source: SourceArgs,
        /// Initial position x1,...,xn
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        /// Initial velocity for the Euler-Lagrange flow
        #[arg(long, allow_hyphen_values = true)]
        v0: Option<String>,
        /// Integrate the second-order Euler-Lagrange flow instead of x' = X(x)
        #[arg(long)]
        el: bool,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t0: f64,
        #[arg(long, allow_hyphen_values = true)]
        t1: f64,
        #[arg(long)]
        dt: f64,
        /// Append per-sample eym and jls columns
        #[arg(long)]
        observables: bool,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Least-squares action of a trajectory CSV
    Action {
        #[command(flatten)]
        source: SourceArgs,
        /// Trajectory CSV with columns t,x1,...,xn
        #[arg(long)]
        traj: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Classify the Lorenz Yang-Mills level set EYM = C
    Levelset {
        /// Level C
        #[arg(long = "C", allow_hyphen_values = true)]
        level: f64,
        /// eps=VALUE
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the self-check suites and report the largest residual of each
    Verify {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Lorenz5,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct SourceArgs {
    /// Built-in model
    #[arg(long, value_enum, conflicts_with = "field")]
    pub model: Option<Model>,
    /// Field file with one `X<i> = <expression>` per line
    #[arg(long)]
    pub field: Option<PathBuf>,
    /// Parameter binding NAME=VALUE (repeatable)
    #[arg(long = "param", value_name = "NAME=VALUE", allow_hyphen_values = true)]
    pub params: Vec<String>,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Write output here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}
