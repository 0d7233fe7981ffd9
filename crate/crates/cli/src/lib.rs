//! Command-line harness over the `congrulab` library.
//!
//! Every subcommand turns its arguments into a [`Report`]: the arguments are
//! echoed as the config block, rows appear in ascending key order, and all
//! sampling draws from named [`congrulab::rng::Stream`]s of the single
//! `--seed`. The binary in `main.rs` only parses, calls [`run`], and writes.

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

pub mod commands;
pub mod parse;
pub mod report;

pub use parse::{IntervalSpec, NumList};
pub use report::{Format, Report};

/// Environment variable that lowers the largest accepted modulus.
pub const MODULUS_CAP_ENV: &str = "CONGRULAB_MAX_MODULUS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NEGATIVE: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;
pub const EXIT_INTERNAL: i32 = 1;

#[derive(Parser, Debug)]
#[command(name = "congrulab", version, about = "Desk-scale experiments on products of short intervals modulo primes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the report to PATH instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide one congruence a·x1⋯x6 + b·x7⋯x13 = c over a box of intervals.
    Solve(SolveArgs),
    /// Solvable fraction of (1, b, c) over uniform boxes {1..len}^13.
    Scan(ScanArgs),
    /// Least uniform length at which every (1, b, c) is solvable.
    Threshold(ThresholdArgs),
    /// Growth of A, A², … for A = units of [1, cutoff] modulo m.
    Growth(GrowthArgs),
    /// Character sum profiles and the energy identity.
    Charsum(CharsumArgs),
    /// Smooth-number counts and greedy factorization checks.
    Smooth(SmoothArgs),
    /// Random quadruples (A, B, C, D) with |A||B||C||D| > p³ against AB + CD.
    Coverage(CoverageArgs),
    /// Write a target as a product of small units modulo m.
    Represent(RepresentArgs),
    /// Basis-order bound on random sets X ∋ 1.
    OlsonSuite(OlsonArgs),
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("box").required(true).args(["intervals", "len"])))]
pub struct SolveArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub a: u64,
    #[arg(long)]
    pub b: u64,
    #[arg(long)]
    pub c: u64,
    /// Thirteen `L:N` specs for the intervals {L+1, …, L+N}, comma-separated.
    #[arg(long)]
    pub intervals: Option<IntervalSpec>,
    /// Thirteen copies of {1, …, n}.
    #[arg(long, value_name = "n")]
    pub len: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct ScanArgs {
    /// Primes, e.g. `5,7,11`.
    #[arg(long)]
    pub p: NumList,
    /// Uniform lengths; defaults to 1..p−1.
    #[arg(long)]
    pub len: Option<NumList>,
    /// Decide this many seeded pairs (b, c) per row instead of all of them.
    #[arg(long)]
    pub sample: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub p: NumList,
    /// Emit the whole solvability curve instead of one row per prime.
    #[arg(long)]
    pub curve: bool,
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("size").required(true).args(["c", "cutoff"])))]
pub struct GrowthArgs {
    #[arg(long)]
    pub m: NumList,
    /// Cutoff ⌊m^c⌋, 0 < c < 1.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub cutoff: Option<u64>,
    #[arg(long, default_value_t = congrulab::growth::DEFAULT_N_MAX)]
    pub n_max: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct CharsumArgs {
    #[command(subcommand)]
    #[serde(flatten)]
    pub mode: CharsumMode,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum CharsumMode {
    /// max over χ ≠ χ0 of |Σ_{n ≤ len} χ(n)| / len.
    Burgess(BurgessArgs),
    /// Energy J counted directly and through characters, plus |XY|·J ≥ |X|²|Y|².
    Identity(IdentityArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct BurgessArgs {
    #[arg(long)]
    pub p: NumList,
    /// Interval lengths; defaults to 1..p−1.
    #[arg(long)]
    pub len: Option<NumList>,
}

#[derive(Args, Debug, Serialize)]
pub struct IdentityArgs {
    #[arg(long, default_value_t = 100)]
    pub instances: u64,
    /// Primes are drawn from [3, p_max].
    #[arg(long, default_value_t = 997)]
    pub p_max: u64,
    /// Largest |X| and |Y|.
    #[arg(long, default_value_t = 50)]
    pub max_set: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct SmoothArgs {
    #[arg(long)]
    pub m: NumList,
    /// Smoothness exponent: primes up to ⌊m^c0⌋.
    #[arg(long, default_value_t = 0.5)]
    pub c0: f64,
    /// Part-size exponent (defaults to c0).
    #[arg(long)]
    pub c: Option<f64>,
    /// Factor every smooth unit x ≤ m greedily and verify the parts.
    #[arg(long)]
    pub check_greedy: bool,
    /// Also check that the parts lie in A = units ≤ ⌊m^c⌋ and compare |A^k| with Ψ_m.
    #[arg(long)]
    pub inclusion: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct CoverageArgs {
    #[arg(long)]
    pub p: NumList,
    /// Quadruples per prime.
    #[arg(long, default_value_t = 1000)]
    pub random: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("size").required(true).args(["c", "cutoff"])))]
pub struct RepresentArgs {
    #[arg(long)]
    pub m: u64,
    #[arg(long, default_value_t = 1)]
    pub target: u64,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub cutoff: Option<u64>,
    #[arg(long, default_value_t = congrulab::growth::DEFAULT_N_MAX)]
    pub n_max: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct OlsonArgs {
    #[arg(long, default_value_t = 200)]
    pub instances: u64,
    #[arg(long, default_value_t = 500)]
    pub m_max: u64,
    /// Largest number of non-identity members of X.
    #[arg(long, default_value_t = 8)]
    pub max_extra: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// A finished report and whether it records a negative decision.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub negative: bool,
    /// Human-readable lines printed beside the report.
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.negative {
            EXIT_NEGATIVE
        } else {
            EXIT_OK
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<congrulab::Error> for CliError {
    fn from(e: congrulab::Error) -> Self {
        use congrulab::Error::*;
        let code = match e {
            ResourceCap { .. } | Unstabilized(_) => EXIT_RESOURCE,
            NotRepresentable { .. } | Degenerate(_) => EXIT_NEGATIVE,
            _ => EXIT_USAGE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

/// The largest modulus any command accepts: the library table cap, lowered
/// by `CONGRULAB_MAX_MODULUS` when set.
pub fn modulus_cap() -> Result<u64, CliError> {
    let hard = congrulab::arith::MAX_TABLE_MODULUS;
    match std::env::var(MODULUS_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map(|cap| cap.min(hard))
            .map_err(|_| CliError::usage(format!("{MODULUS_CAP_ENV} must be an integer (got {v:?})"))),
        Err(_) => Ok(hard),
    }
}

fn config<T: Serialize>(args: &T, format: Format) -> Value {
    let mut v = serde_json::to_value(args).expect("args serialize");
    if let Value::Object(map) = &mut v {
        map.insert("format".into(), serde_json::to_value(format).expect("format"));
    }
    v
}

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let cap = modulus_cap()?;
    let f = cli.format;
    match &cli.command {
        Command::Solve(a) => commands::solve(a, config(a, f), cap),
        Command::Scan(a) => commands::scan(a, config(a, f), cap),
        Command::Threshold(a) => commands::threshold(a, config(a, f), cap),
        Command::Growth(a) => commands::growth(a, config(a, f), cap),
        Command::Charsum(a) => match &a.mode {
            CharsumMode::Burgess(b) => commands::burgess(b, config(a, f), cap),
            CharsumMode::Identity(i) => commands::identity(i, config(a, f), cap),
        },
        Command::Smooth(a) => commands::smooth(a, config(a, f), cap),
        Command::Coverage(a) => commands::coverage(a, config(a, f), cap),
        Command::Represent(a) => commands::represent(a, config(a, f), cap),
        Command::OlsonSuite(a) => commands::olson(a, config(a, f), cap),
    }
}

/// Parses `args` (without the program name) and renders the report body.
pub fn run_args<I, S>(args: I) -> Result<(Outcome, String), CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("congrulab"))
        .chain(args.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::usage(e.to_string()))?;
    let outcome = run(&cli)?;
    let body = outcome.report.render(cli.format);
    Ok((outcome, body))
}
