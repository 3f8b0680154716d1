use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "fatoulab",
    version,
    about = "Experiments on the boundary dynamics of multiply connected Fatou components"
)]
#[command(arg_required_else_help = true)]
pub struct Cli {
    /// Worker thread cap. Results do not depend on it.
    #[arg(long, global = true, env = "FATOULAB_THREADS")]
    pub threads: Option<usize>,
    /// Directory for the manifest and any CSV/PPM outputs.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the zero spacing τ of the Baker basin Blaschke product.
    Tau(TauArgs),
    /// Check f(e^{iz}) = e^{iF(z)} on random points of a horizontal strip.
    VerifySemiconj(SemiconjArgs),
    /// Evaluate the Blaschke product on the unit circle.
    BlaschkeEval(BlaschkeArgs),
    /// Estimate harmonic measure.
    Harmonic(HarmonicArgs),
    /// Classify radial boundary behaviour on the annulus covering.
    ClassifyRadial(RadialArgs),
    /// Orbit statistics of a circle map.
    CircleStats(CircleStatsArgs),
    /// Iterate an arc and report how much of the circle it covers.
    Spread(SpreadArgs),
    /// Classify a grid of the dynamical plane and write a PPM image.
    Render(RenderArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct TauArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1e-14)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SemiconjArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Bound on |Im z|.
    #[arg(long, default_value_t = 3.0)]
    pub im_bound: f64,
    /// Pass threshold for the largest residual.
    #[arg(long, default_value_t = 1e-12)]
    pub bound: f64,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct BlaschkeArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Angles in radians, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub theta: Vec<f64>,
    #[arg(long, default_value_t = 1e-12)]
    pub err: f64,
    #[arg(long, default_value_t = fatoulab::blaschke::DEFAULT_EXCLUSION_RADIUS)]
    pub exclusion_radius: f64,
    /// Also run the Lebesgue-invariance KS test on this many angles.
    #[arg(long)]
    pub ks_samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    Annulus,
    Champagne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Wos,
    Pushforward,
    ClosedForm,
    /// Walk-on-Spheres against the covering pushforward.
    CrossValidate,
}

#[derive(Debug, Args, Serialize)]
pub struct HarmonicArgs {
    #[arg(long, value_enum)]
    pub domain: DomainKind,
    #[arg(long, value_enum)]
    pub method: Method,
    /// Annulus A(1/R, R).
    #[arg(long = "R", default_value_t = std::f64::consts::E)]
    pub r: f64,
    /// Base point z0 = ρ on the positive axis (annulus only).
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 5)]
    pub bubbles: usize,
    #[arg(long, default_value_t = 0.5)]
    pub ring: f64,
    #[arg(long, default_value_t = 0.1)]
    pub bubble_radius: f64,
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    pub phase: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub walks: u64,
    #[arg(long, default_value_t = 64)]
    pub bins: usize,
    /// ε-shell; defaults to 1e-6 times the domain diameter.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = fatoulab::harmonic::DEFAULT_STEP_CAP)]
    pub step_cap: u64,
    /// Support-test threshold for every bin.
    #[arg(long, default_value_t = 1e-4)]
    pub min_bin_mass: f64,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct RadialArgs {
    #[arg(long = "R", default_value_t = std::f64::consts::E)]
    pub r: f64,
    /// Boundary angles in radians, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub xi: Vec<f64>,
    /// Also classify this many equispaced angles.
    #[arg(long)]
    pub equispaced: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Include the radial distance sequences in the output.
    #[arg(long)]
    pub distances: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct CircleStatsArgs {
    #[arg(long)]
    pub map: String,
    /// Orbit length.
    #[arg(long)]
    pub n: usize,
    /// Starting angle; when omitted a seeded random start is used, and for
    /// power maps a random digit expansion.
    #[arg(long, allow_hyphen_values = true)]
    pub theta0: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub ks_samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct SpreadArgs {
    #[arg(long)]
    pub map: String,
    /// `start,length` in radians.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
    pub arc: Vec<f64>,
    /// Iteration cap for single maps; sequences run to their length.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = fatoulab::circle::DEFAULT_SPREAD_GRID)]
    pub grid: usize,
    /// Include the per-iteration covered fractions.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct RenderArgs {
    #[arg(long)]
    pub map: String,
    /// GridSpec JSON file.
    #[arg(long)]
    pub config: PathBuf,
    /// Loop probe circle `re,im,radius`.
    #[arg(long = "loop", value_delimiter = ',', allow_hyphen_values = true)]
    pub loop_circle: Vec<f64>,
    /// Run the conjugation and inversion symmetry checks.
    #[arg(long)]
    pub symmetry: bool,
    #[arg(long, default_value = "render.ppm")]
    pub image: String,
}
