use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "varmotion", version, about = "Finite-velocity random motions: laws, series and Monte Carlo checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Symmetric telegraph process on the line.
    Telegraph {
        #[command(subcommand)]
        action: TelegraphAction,
    },
    /// Telegraph process pushed through a velocity map.
    Motion1d {
        #[command(subcommand)]
        action: Motion1dAction,
    },
    /// Planar motion with four orthogonal directions.
    Planar {
        #[command(subcommand)]
        action: PlanarAction,
    },
    /// Motion on (0, 1) with direction-dependent speed.
    Dirdep {
        #[command(subcommand)]
        action: DirdepAction,
    },
    /// Telegraph process with time-varying speed.
    Timevar {
        #[command(subcommand)]
        action: TimevarAction,
    },
    /// Bivariate geometric telegraph model.
    Geo2d {
        #[command(subcommand)]
        action: Geo2dAction,
    },
    /// Generalized Euler polynomial coefficients (JSON).
    Euler(EulerArgs),
    /// Run an acceptance suite and print its reports as a JSON array.
    Accept(AcceptArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args, Serialize)]
pub struct Output {
    /// Table format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct Motion {
    /// Switching rate.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Speed.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Time horizon.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
}

/// Replicas for sampling commands; the seed is always explicit.
#[derive(Debug, Args, Serialize)]
pub struct Sampling {
    #[arg(long, default_value_t = 1000)]
    pub replicas: usize,
    #[arg(long)]
    pub seed: u64,
}

/// Optional Monte Carlo check next to an analytic value.
#[derive(Debug, Args, Serialize)]
pub struct Check {
    /// Monte Carlo replicas; 0 prints the analytic column only.
    #[arg(long, default_value_t = 0)]
    pub replicas: usize,
    /// Required when `--replicas` is positive.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum TelegraphAction {
    /// Endpoints `T(t)` with their event counts.
    Sample {
        #[command(flatten)]
        motion: Motion,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        output: Output,
    },
    /// Continuous density on a midpoint grid of `(-ct, ct)`.
    Density(GridArgs),
    /// Raw moments of order 0..=n.
    Moments {
        #[command(flatten)]
        motion: Motion,
        /// Highest order.
        #[arg(long, default_value_t = 6)]
        n: u32,
        #[command(flatten)]
        check: Check,
        #[command(flatten)]
        output: Output,
    },
    /// Distribution function on a grid of `[-ct, ct]`.
    Cdf(GridArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct GridArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub motion: Motion,
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Constant,
    Linear,
    Power,
    Logistic,
    Symlogistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantArg {
    Reflect,
    Absorb,
}

#[derive(Debug, Args, Serialize)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Constant)]
    pub family: FamilyArg,
    /// Exponent of the power family `v(x) = c x^alpha`.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Behaviour of the power family at 0 when `alpha < 1`.
    #[arg(long, value_enum, default_value_t = VariantArg::Reflect)]
    pub variant: VariantArg,
    #[arg(long, default_value_t = 0.5)]
    pub x0: f64,
}

#[derive(Debug, Subcommand)]
pub enum Motion1dAction {
    /// Endpoints `X(t)` and absorption times.
    Sample {
        #[command(flatten)]
        motion: Motion,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        output: Output,
    },
    /// Continuous density on a midpoint grid of the support.
    Density {
        #[command(flatten)]
        motion: Motion,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Support endpoints, their atoms and the barrier time.
    Support {
        #[command(flatten)]
        motion: Motion,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Moments `E[X(t)^k]`, k = 1..=n: series (logistic) and Monte Carlo.
    Moments {
        #[command(flatten)]
        motion: Motion,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 2)]
        n: u32,
        /// Series truncation order.
        #[arg(long, default_value_t = 20)]
        terms: u32,
        #[command(flatten)]
        check: Check,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PlanarFamily {
    Constant,
    Symlogistic,
}

#[derive(Debug, Args, Serialize)]
pub struct PlanarArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub motion: Motion,
    /// Probability that a switch flips `U - V`.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Velocity map applied to both coordinates.
    #[arg(long, value_enum, default_value_t = PlanarFamily::Constant)]
    pub family: PlanarFamily,
    /// Starting point of each mapped coordinate.
    #[arg(long, default_value_t = 0.0)]
    pub x0: f64,
}

#[derive(Debug, Subcommand)]
pub enum PlanarAction {
    /// Endpoints with boundary flags.
    Sample {
        #[command(flatten)]
        planar: PlanarArgs,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        output: Output,
    },
    /// Interior density on a `grid × grid` heatmap.
    Density {
        #[command(flatten)]
        planar: PlanarArgs,
        #[arg(long, default_value_t = 51)]
        grid: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Boundary and side probabilities.
    Boundary {
        #[command(flatten)]
        planar: PlanarArgs,
        #[command(flatten)]
        check: Check,
        #[command(flatten)]
        output: Output,
    },
    /// The four sides of the support as polylines.
    Support {
        #[command(flatten)]
        planar: PlanarArgs,
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StartArg {
    D0,
    D1,
}

#[derive(Debug, Args, Serialize)]
pub struct DirdepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub motion: Motion,
    #[arg(long, default_value_t = 0.5)]
    pub x0: f64,
}

#[derive(Debug, Subcommand)]
pub enum DirdepAction {
    /// Endpoints `X(t)`.
    Sample {
        #[command(flatten)]
        dirdep: DirdepArgs,
        /// Fixed initial direction; equiprobable when omitted.
        #[arg(long, value_enum)]
        start: Option<StartArg>,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        output: Output,
    },
    /// `E[X(s)]` on a grid of `(0, t]`.
    Mean {
        #[command(flatten)]
        dirdep: DirdepArgs,
        #[arg(long, default_value_t = 11)]
        grid: usize,
        #[command(flatten)]
        check: Check,
        #[command(flatten)]
        output: Output,
    },
    /// `E[X(t) | D(0), N(t) = k]` for k = 0..=n and both initial directions.
    Condmean {
        #[command(flatten)]
        dirdep: DirdepArgs,
        #[arg(long, default_value_t = 4)]
        n: u32,
        #[command(flatten)]
        check: Check,
        #[command(flatten)]
        output: Output,
    },
    /// Endpoint fractions near 0 and 1 with `lambda = c^2` (`--lambda` is ignored).
    Collapse {
        #[command(flatten)]
        dirdep: DirdepArgs,
        /// Width of the bands next to 0 and 1.
        #[arg(long, default_value_t = 0.01)]
        band: f64,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaKind {
    /// `sigma = a`.
    Const,
    /// `sigma = b u`.
    Linear,
    /// `sigma = a + b u`.
    Affine,
    /// Monotone cubic through the `(t, sigma)` knots of `--table`.
    Table,
}

#[derive(Debug, Args, Serialize)]
pub struct SigmaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub motion: Motion,
    #[arg(long, value_enum, default_value_t = SigmaKind::Const)]
    pub sigma: SigmaKind,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_b: f64,
    /// CSV file of `t,sigma` knots.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum TimevarAction {
    /// Endpoints `X(t)`.
    Sample {
        #[command(flatten)]
        sigma: SigmaArgs,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        output: Output,
    },
    /// `Cov(X(s), X(t))` next to its hydrodynamic limit.
    Cov {
        #[command(flatten)]
        sigma: SigmaArgs,
        /// Earlier time; defaults to `t`.
        #[arg(long)]
        s: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Gaussian limit density on a grid of `±4` standard deviations.
    Limit {
        #[command(flatten)]
        sigma: SigmaArgs,
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct Geo2dArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub motion: Motion,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 1.0)]
    pub x0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub y0: f64,
}

#[derive(Debug, Subcommand)]
pub enum Geo2dAction {
    /// Endpoint pairs `(X(t), Y(t))`.
    Sample {
        #[command(flatten)]
        geo: Geo2dArgs,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        output: Output,
    },
    /// Interior joint density on a log-spaced `grid × grid` heatmap.
    Density {
        #[command(flatten)]
        geo: Geo2dArgs,
        #[arg(long, default_value_t = 51)]
        grid: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Hydrodynamic-limit density on a log-spaced heatmap of `±span` log units.
    Limit {
        #[command(flatten)]
        geo: Geo2dArgs,
        #[arg(long, default_value_t = 51)]
        grid: usize,
        #[arg(long, default_value_t = 3.0)]
        span: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Parameters of the limiting correlated diffusion.
    Params {
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct EulerArgs {
    /// Degree.
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub theta: f64,
    /// Evaluate at this point instead of printing coefficients.
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Primary,
}

#[derive(Debug, Args, Serialize)]
pub struct AcceptArgs {
    #[arg(long, value_enum, default_value_t = Suite::Primary)]
    pub suite: Suite,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}
