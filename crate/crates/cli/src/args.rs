use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use feast_gsvd::driver::{SubspaceSize, Tolerance};
use feast_gsvd::oracle::ArtificialGuess;
use feast_gsvd::{FilterVariant, Options};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "feast-gsvd", version, about = "Partial SVD/GSVD by contour-filtered subspace iteration")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute the singular values inside an interval.
    Solve(SolveArgs),
    /// Estimate how many singular values lie in the interval.
    Estimate(CommonArgs),
    /// Run all four filter variants from the same starting subspace.
    CompareFilters(CompareArgs),
    /// Run the solver from a supplied starting subspace.
    Refine(RefineArgs),
    /// Download a test matrix into the local cache.
    Fetch(FetchArgs),
}

#[derive(Args, Debug, Clone)]
pub struct PencilArgs {
    /// Matrix Market file for A (same as --a).
    #[arg(value_name = "A")]
    pub a_pos: Option<PathBuf>,
    #[arg(long = "a", value_name = "PATH")]
    pub a: Option<PathBuf>,
    /// Plain SVD of A.
    #[arg(long, conflicts_with = "gsvd")]
    pub svd: bool,
    /// GSVD of (A, B); needs --b or --derivative-b.
    #[arg(long)]
    pub gsvd: bool,
    #[arg(long = "b", value_name = "PATH")]
    pub b: Option<PathBuf>,
    /// Use the (n+1) x n first-difference matrix as B.
    #[arg(long)]
    pub derivative_b: bool,
    /// Work with the conjugate transpose of A (and of B when read from file).
    #[arg(long)]
    pub transpose: bool,
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Search interval "alpha,beta" with beta > alpha >= 0.
    #[arg(long, allow_hyphen_values = true)]
    pub interval: String,
    #[arg(long, default_value_t = 12)]
    pub nodes: usize,
    #[arg(long, default_value_t = 5.0)]
    pub aspect: f64,
    /// Subspace size or "auto".
    #[arg(long, default_value = "auto")]
    pub subspace: String,
    /// Residual tolerance or "auto" (1e-14 sqrt(m)).
    #[arg(long, default_value = "auto")]
    pub tol: String,
    /// plus | plus-rr | sum | augmented
    #[arg(long, default_value = "augmented")]
    pub variant: String,
    #[arg(long, default_value_t = 30)]
    pub max_iter: usize,
    /// Probe vectors for the trace estimate.
    #[arg(long, default_value_t = 30)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Refilter converged triplets every iteration.
    #[arg(long)]
    pub no_locking: bool,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Directory for report and history files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Format of the report printed to standard output.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct CommonArgs {
    #[command(flatten)]
    pub pencil: PencilArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Also write the converged U and W blocks as U.mtx and W.mtx.
    #[arg(long)]
    pub save_vectors: bool,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Starting subspace: random, negative, nearly-negative or noisy:q.
    #[arg(long, default_value = "random")]
    pub init: String,
}

#[derive(Args, Debug)]
pub struct RefineArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Dense Matrix Market file with the U block of the guess.
    #[arg(long, requires = "guess_w")]
    pub guess_u: Option<PathBuf>,
    #[arg(long, requires = "guess_u")]
    pub guess_w: Option<PathBuf>,
    /// Build the guess from the dense reference instead (negative, nearly-negative, noisy:q).
    #[arg(long, conflicts_with = "guess_u")]
    pub init: Option<String>,
}

#[derive(Args, Debug)]
pub struct FetchArgs {
    /// Matrix name from the test set, or Group/Name for any other matrix.
    pub name: String,
    /// Cache directory (default: $FEAST_CACHE_DIR, then ./feast-cache).
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BSource {
    None,
    Path(PathBuf),
    Derivative,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialGuess {
    Random,
    Files { u: PathBuf, w: PathBuf },
    Artificial(ArtificialGuess),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubcommandKind {
    Solve,
    Estimate,
    CompareFilters,
    Refine,
}

/// Everything a run needs, validated.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub subcommand: SubcommandKind,
    pub a_path: PathBuf,
    pub b: BSource,
    pub transpose: bool,
    pub guess: InitialGuess,
    pub interval: (f64, f64),
    pub options: Options,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub save_vectors: bool,
}

impl RunConfig {
    pub fn from_common(kind: SubcommandKind, c: &CommonArgs) -> Result<Self, CliError> {
        let p = &c.pencil;
        let a_path = match (&p.a_pos, &p.a) {
            (Some(_), Some(_)) => return Err(CliError::Usage("A given both positionally and with --a".into())),
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => return Err(CliError::Usage("missing matrix A (positional or --a PATH)".into())),
        };
        let b = match (&p.b, p.derivative_b) {
            (Some(_), true) => return Err(CliError::Usage("--b and --derivative-b are mutually exclusive".into())),
            (Some(path), false) => BSource::Path(path.clone()),
            (None, true) => BSource::Derivative,
            (None, false) => BSource::None,
        };
        if p.svd && b != BSource::None {
            return Err(CliError::Usage("--svd takes no B matrix".into()));
        }
        if p.gsvd && b == BSource::None {
            return Err(CliError::Usage("--gsvd needs --b PATH or --derivative-b".into()));
        }

        let s = &c.solver;
        let interval = parse_interval(&s.interval)?;
        let mut options = Options::new(interval.0, interval.1);
        options.n_nodes = s.nodes;
        options.aspect_ratio = s.aspect;
        options.trace_nodes = s.nodes;
        options.subspace_size = parse_auto(&s.subspace, "--subspace")?.map_or(SubspaceSize::Auto, SubspaceSize::Fixed);
        options.tol = parse_auto(&s.tol, "--tol")?.map_or(Tolerance::Auto, Tolerance::Fixed);
        options.variant = s.variant.parse::<FilterVariant>().map_err(|e| CliError::Usage(e.to_string()))?;
        options.max_iterations = s.max_iter;
        options.trace_samples = s.samples;
        options.seed = s.seed;
        options.soft_locking = !s.no_locking;
        options.validate().map_err(|e| CliError::Usage(e.to_string()))?;

        Ok(RunConfig {
            subcommand: kind,
            a_path,
            b,
            transpose: p.transpose,
            guess: InitialGuess::Random,
            interval,
            options,
            out: c.output.out.clone(),
            format: c.output.format,
            seed: s.seed,
            save_vectors: false,
        })
    }
}

pub fn parse_guess_kind(s: &str) -> Result<InitialGuess, CliError> {
    if s == "random" {
        return Ok(InitialGuess::Random);
    }
    s.parse::<ArtificialGuess>().map(InitialGuess::Artificial).map_err(|e| CliError::Usage(e.to_string()))
}

/// "alpha,beta" with finite endpoints and beta > alpha >= 0.
pub fn parse_interval(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("interval '{s}' must be 'alpha,beta' with beta > alpha >= 0"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(a.is_finite() && b.is_finite() && a >= 0.0 && b > a) {
        return Err(bad());
    }
    Ok((a, b))
}

fn parse_auto<V: std::str::FromStr>(s: &str, flag: &str) -> Result<Option<V>, CliError> {
    if s == "auto" {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| CliError::Usage(format!("{flag} expects a number or 'auto', got '{s}'")))
}
