use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use geoforge_core::PrecisionContext;
use rug::Float;

mod commands;
mod output;

/// Closed geodesics, cusp strands and thick/thin constants of cusped
/// hyperbolic surfaces.
#[derive(Debug, Parser)]
#[command(name = "geoforge", version)]
struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, env = "GEOFORGE_PRECISION_BITS", default_value_t = 128)]
    precision: u32,

    /// Omit the metadata header (timestamp, version, configuration).
    #[arg(long, global = true)]
    no_meta: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Winding number, length window or depth threshold of a cusp strand.
    Strand(StrandArgs),
    /// Thick/thin constants and the thresholds D and K of a surface.
    Constants(ConstantsArgs),
    /// Length and self-intersection table of closed geodesics on the thrice
    /// punctured sphere.
    Survey(SurveyArgs),
    /// Classify one word and compute its self-intersection number.
    Word(WordArgs),
    /// Evaluate the small-systole example surfaces.
    Example(ExampleArgs),
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("query").required(true).args(["length", "omega", "h0"])))]
struct StrandArgs {
    /// Length of the horocycle bounding the cusp neighbourhood.
    #[arg(long)]
    h: String,
    /// Strand length: report its winding number.
    #[arg(long)]
    length: Option<String>,
    /// Winding number: report the admissible length window.
    #[arg(long)]
    omega: Option<u64>,
    /// Deeper horocycle length: report the length needed to reach it.
    #[arg(long)]
    h0: Option<String>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("surface").required(true).args(["surface_y", "g", "h_max"])))]
struct ConstantsArgs {
    /// The thrice punctured sphere.
    #[arg(long)]
    surface_y: bool,
    /// Genus of a topological class.
    #[arg(long, requires_all = ["n", "s"])]
    g: Option<u32>,
    /// Number of cusps of a topological class.
    #[arg(long, requires = "g")]
    n: Option<u32>,
    /// Systole lower bound of a topological class.
    #[arg(long, requires = "g")]
    s: Option<String>,
    /// Longest embedded horocycle of an explicit surface.
    #[arg(long, requires_all = ["systole", "d1", "d_eps0"])]
    h_max: Option<String>,
    /// Systole of an explicit surface.
    #[arg(long, requires = "h_max")]
    systole: Option<String>,
    /// Orthogonal self-distance of a length-one horocycle.
    #[arg(long, requires = "h_max")]
    d1: Option<String>,
    /// Orthogonal self-distance at the thin-part boundary.
    #[arg(long, requires = "h_max")]
    d_eps0: Option<String>,
    /// Evaluate C(k) for these k.
    #[arg(long = "k")]
    ks: Vec<u64>,
    /// Search cap for D is 10^this.
    #[arg(long, default_value_t = geoforge_core::constants::DEFAULT_D_CAP_EXPONENT)]
    d_cap_exp: u32,
    /// Search cap for the K variants is 10^this.
    #[arg(long, default_value_t = geoforge_core::constants::DEFAULT_K_CAP_EXPONENT)]
    k_cap_exp: u32,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FilterArg {
    All,
    Hyperbolic,
    HyperbolicPrimitive,
}

#[derive(Debug, Args)]
struct SurveyArgs {
    /// Longest word enumerated.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    max_len: u64,
    /// Summarise the shortest class with at least k self-intersections.
    #[arg(long = "k", value_parser = clap::value_parser!(u64).range(1..))]
    ks: Vec<u64>,
    #[arg(long, value_enum, default_value_t = FilterArg::HyperbolicPrimitive)]
    filter: FilterArg,
    /// Worker threads (defaults to the number of cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the per-k summaries as JSON to this file (CSV mode prints them
    /// to stderr otherwise).
    #[arg(long)]
    summary_out: Option<std::path::PathBuf>,
    /// First Cayley-ball radius of the intersection search.
    #[arg(long)]
    start_radius: Option<usize>,
    /// Last Cayley-ball radius of the intersection search.
    #[arg(long)]
    max_radius: Option<usize>,
}

#[derive(Debug, Args)]
struct WordArgs {
    /// Letters a, b and their inverses A, B.
    word: String,
}

#[derive(Debug, Args)]
struct ExampleArgs {
    /// Family parameter; repeat to evaluate several surfaces.
    #[arg(long = "k", required = true, value_parser = clap::value_parser!(u32).range(1..))]
    ks: Vec<u32>,
    /// Precision cap for the certified comparisons.
    #[arg(long, default_value_t = geoforge_core::pants::EXAMPLE_PRECISION_CAP)]
    precision_cap: u32,
}

/// Failure classes, reported through the exit status.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Domain(anyhow::Error),
    Assertion(anyhow::Error),
    Precision(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Domain(_) => 3,
            Failure::Assertion(_) => 4,
            Failure::Precision(_) => 5,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Usage(e) | Failure::Domain(e) | Failure::Assertion(e) | Failure::Precision(e) => e,
        }
    }
}

impl From<geoforge_core::Error> for Failure {
    fn from(e: geoforge_core::Error) -> Self {
        use geoforge_core::Error as E;
        match e {
            E::PrecisionExhausted { .. } | E::NoSolutionBelowCap { .. } | E::ToleranceBreach { .. } => {
                Failure::Precision(e.into())
            }
            other => Failure::Domain(other.into()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Domain(anyhow!(e).context("writing output"))
    }
}

pub type CmdResult = Result<(), Failure>;

pub fn parse_real(name: &str, text: &str, ctx: &PrecisionContext) -> Result<Float, Failure> {
    Float::parse(text)
        .map(|p| Float::with_val(ctx.bits, p))
        .with_context(|| format!("--{name} expects a real number, got {text:?}"))
        .map_err(Failure::Usage)
}

fn run(cli: Cli) -> CmdResult {
    if cli.precision < 16 {
        return Err(Failure::Usage(anyhow!("--precision must be at least 16 bits")));
    }
    let ctx = PrecisionContext::new(cli.precision);
    let meta = output::Meta::new(cli.no_meta, &ctx);
    match cli.command {
        Command::Strand(a) => commands::strand(&a, &ctx, &meta),
        Command::Constants(a) => commands::constants(&a, &ctx, &meta),
        Command::Survey(a) => commands::survey(&a, &ctx, &meta),
        Command::Word(a) => commands::word(&a, &ctx, &meta),
        Command::Example(a) => commands::example(&a, &ctx, &meta),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}
