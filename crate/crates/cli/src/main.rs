//! `trichain`: sample, verify and inspect the triangle-switch chain.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use trichain::enumeration::DEFAULT_LIMIT;
use trichain::Error;

#[derive(Parser, Debug)]
#[command(
    name = "trichain",
    version,
    about = "Triangle-switch Markov chain toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the chain and record triangle counts.
    Sample(SampleArgs),
    /// Enumerate the state space and check the chain against exact results.
    Verify(VerifyArgs),
    /// Build the simulation path of one switch.
    Path(PathArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Chain {
    Switch,
    Triswitch,
}

impl From<Chain> for trichain::ChainKind {
    fn from(c: Chain) -> Self {
        match c {
            Chain::Switch => trichain::ChainKind::Switch,
            Chain::Triswitch => trichain::ChainKind::TriSwitch,
        }
    }
}

/// `--nu`: absent means uncapped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Nu {
    Auto,
    Fixed(usize),
}

fn parse_nu(s: &str) -> Result<Nu, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Nu::Auto);
    }
    s.parse::<usize>()
        .ok()
        .filter(|&v| v >= 1)
        .map(Nu::Fixed)
        .ok_or_else(|| format!("expected 'auto' or a positive integer, got {s:?}"))
}

/// Accepts `1000000`, `1_000_000` and `1e6`.
fn parse_count(s: &str) -> Result<u64, String> {
    let clean = s.replace('_', "");
    if let Ok(v) = clean.parse::<u64>() {
        return Ok(v);
    }
    match clean.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 => Ok(x as u64),
        _ => Err(format!("expected a non-negative integer, got {s:?}")),
    }
}

#[derive(Args, Debug, Clone)]
pub struct ChainOpts {
    /// Degree sequence, e.g. `3x100` or `4,3,3,3,3`.
    #[arg(long)]
    pub degrees: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Triangle cap: a number, or `auto` for floor(ln n / ln ln n).
    #[arg(long, value_parser = parse_nu)]
    pub nu: Option<Nu>,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[command(flatten)]
    pub chain_opts: ChainOpts,
    /// Start from this edge-list file instead of a realization of `--degrees`.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "triswitch")]
    pub chain: Chain,
    #[arg(long, value_parser = parse_count)]
    pub steps: u64,
    #[arg(long, value_parser = parse_count, default_value = "0")]
    pub burn_in: u64,
    #[arg(long, value_parser = parse_count, default_value = "1")]
    pub thin: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of independent chains; chain `i` uses seed `seed ^ i`.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Largest acceptable TV distance to the Poisson reference.
    #[arg(long, default_value_t = 0.05)]
    pub tv_threshold: f64,
    /// Leave the per-sample vector out of JSON output.
    #[arg(long)]
    pub omit_samples: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub chain_opts: ChainOpts,
    /// Maximum number of states to enumerate.
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    pub limit: usize,
    /// State-space cache file; read if present, written otherwise.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Largest accepted max-norm error of the stationary vector.
    #[arg(long, default_value_t = 1e-10)]
    pub stationary_tol: f64,
    /// TV level whose first hitting step is reported.
    #[arg(long, default_value_t = 0.05)]
    pub tv_threshold: f64,
    /// Steps of the exact TV curve.
    #[arg(long, default_value_t = 200)]
    pub tv_steps: usize,
    /// Also compute the spectral mixing bound.
    #[arg(long)]
    pub spectral: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct PathArgs {
    /// Edge-list file of the current graph.
    #[arg(long)]
    pub graph: PathBuf,
    /// Four vertices `a1,a2,a3,a4`: remove a1a2, a3a4 and add a1a3, a2a4.
    #[arg(long)]
    pub switch: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

/// Reasons a command stops with a non-zero exit code.
#[derive(Debug)]
pub enum Failure {
    Lib(Error),
    Input(String),
    Checks(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Checks(_) => 5,
            Failure::Lib(e) => match e {
                Error::NoValidPair => 3,
                Error::SpaceTooLarge { .. } => 4,
                Error::MinDegreeTooSmall(_) => 6,
                Error::NonGraphical(_)
                | Error::InvalidDegrees(_)
                | Error::InvalidSwitch { .. }
                | Error::InvalidConfig(_)
                | Error::PlantPrecondition(_)
                | Error::Parse(_)
                | Error::Io(_) => 2,
                _ => 1,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Input(m) => f.write_str(m),
            Failure::Checks(k) => write!(f, "{k} check(s) failed"),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TRICHAIN_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(a) => commands::sample(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Path(a) => commands::path(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("trichain: {f}");
            ExitCode::from(f.code())
        }
    }
}
