use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "symplectic-hecke",
    version,
    about = "Hecke operators, L-functions and equidistribution on Sp(2n)"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// TOML file of defaults, keyed by flag name. Flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Right cosets of T(p,(0,...,0,1)) and its square.
    Cosets(CosetsArgs),
    /// Structure constants of T(p,(0,...,0,1))^2 with optional cross-checks.
    Product(ProductArgs),
    /// Local factors and Dirichlet coefficients at a Satake point.
    Lfactor(LfactorArgs),
    /// Plancherel and Sato-Tate measures.
    Measure(MeasureArgs),
    /// One- and two-level density integrals and the symplectic ensemble.
    Leveldensity(LevelDensityArgs),
    /// Dimension constants, bounds and admissibility at a level.
    Counting(CountingArgs),
    /// Cross-module consistency suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct CosetsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: u64,
    /// Compare against the lattice enumeration (n <= 2).
    #[arg(long)]
    pub verify_oracle: bool,
    /// Write every representative as a 2n x 2n array of "num/p^e" strings.
    #[arg(long)]
    pub dump_reps: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct ProductArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: u64,
    /// Also count over all pairs of cosets.
    #[arg(long)]
    pub pairwise: bool,
    /// Also compute right-coset degrees of the targets and check the balance.
    #[arg(long)]
    pub degrees: bool,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct LfactorArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: u64,
    /// Angles in [0, pi]; either decimals or rational multiples of pi
    /// such as `pi/3` or `2pi/5`, which selects exact arithmetic.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub theta: Vec<String>,
    #[arg(long, default_value_t = 6)]
    pub order: usize,
    /// Largest accepted relative residual in floating mode.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct MeasureArgs {
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Odd prime or `inf`.
    #[arg(long, default_value = "inf")]
    pub p: String,
    /// Number of moments of the Hecke eigenvalue to report.
    #[arg(long)]
    pub moments: Option<u32>,
    /// Number of samples to draw.
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Gauss-Legendre points per axis.
    #[arg(long, default_value_t = 64)]
    pub points: usize,
    /// Tabulate the sup distance to the Sato-Tate density.
    #[arg(long)]
    pub compare_st: bool,
    #[arg(long, value_delimiter = ',', default_value = "3,11,101,1009,10007")]
    pub p_list: Vec<u64>,
    /// Grid points per axis for the sup distance.
    #[arg(long, default_value_t = 41)]
    pub grid: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingArg {
    /// `2m / 2π`.
    Dimension,
    /// `(2m + 1) / 2π`.
    DimensionPlusOne,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct LevelDensityArgs {
    #[arg(long, default_value_t = 1)]
    pub ell: usize,
    /// Support parameters, one per level (a single value is repeated).
    #[arg(long, value_delimiter = ',', required = true)]
    pub beta: Vec<f64>,
    /// Even matrix size 2m of the USp(2m) ensemble.
    #[arg(long)]
    pub ensemble_dim: Option<usize>,
    #[arg(long, default_value_t = 2000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ScalingArg::Dimension)]
    pub scaling: ScalingArg,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct CountingArgs {
    /// Level.
    #[arg(long = "N", id = "level")]
    #[serde(rename = "N")]
    pub level: u64,
    /// Genus.
    #[arg(long)]
    pub n: usize,
    /// Exponent of the old-space divisor sum; defaults to 2n^2 + n.
    #[arg(long)]
    pub r: Option<u32>,
    /// Main-term constant for the dimension asymptotic.
    #[arg(long)]
    pub ck: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct VerifyArgs {
    /// Only the small Hecke and identity suites.
    #[arg(long)]
    pub quick: bool,
}
