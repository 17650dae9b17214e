//! The `jiggle` command line tool.
//!
//! Every artifact is JSON (complexes, maps, relation blocks, reports); OFF
//! is available as an export for viewing. Exit status is 0 on success, 2
//! when a result fails certification and 1 on usage, parse or input
//! errors.

mod commands;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::relations::Certification;
use crate::Error;

/// Environment variable holding the default certification mode.
pub const CERTIFICATION_ENV: &str = "JIGGLE_CERTIFICATION";

#[derive(Debug, Parser)]
#[command(name = "jiggle", version, about = "Crystalline subdivision and jiggling of piecewise linear maps")]
pub struct Cli {
    /// Recorded in reports; runs are deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Highest subdivision level any search may reach.
    #[arg(long, global = true, default_value_t = 12)]
    pub lmax: u32,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Crystalline or generalized crystalline subdivision of a complex.
    Subdivide(SubdivideArgs),
    /// Greedy star coloring of a complex or of its subdivision.
    Color(ColorArgs),
    /// Shape functionals per subdivision level.
    Metrics(MetricsArgs),
    /// Linearization of a map on a crystalline subdivision.
    Linearize(LinearizeArgs),
    /// Jiggles a map into a PL solution of a relation.
    Jiggle(JiggleArgs),
    /// Moves a triangulation into general position with respect to
    /// distributions.
    JiggleTriangulation(TriangulationArgs),
    /// Re-checks a map or triangulation against a relation.
    Verify(VerifyArgs),
    /// Built-in end to end scenarios.
    #[command(subcommand)]
    Demo(Demo),
}

#[derive(Debug, Args)]
pub struct SubdivideArgs {
    /// Complex JSON.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub level: u32,
    /// Region JSON (file or inline) around which to run the generalized
    /// subdivision from `--l0` to `--l1`.
    #[arg(long, requires_all = ["l0", "l1", "delta"])]
    pub cone_off: Option<String>,
    #[arg(long)]
    pub l0: Option<u32>,
    #[arg(long)]
    pub l1: Option<u32>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write an OFF file.
    #[arg(long)]
    pub emit_off: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ColorArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub level: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub max_level: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LinearizeArgs {
    /// Map JSON.
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long)]
    pub level: u32,
    #[arg(long)]
    pub out: PathBuf,
}

/// Relation selection shared by `jiggle` and `verify`.
#[derive(Debug, Args)]
pub struct RelationArgs {
    /// A relation name (transverse, maxrank, contact3d, verygenpos) or a
    /// relation block as a JSON file or inline JSON.
    #[arg(long)]
    pub relation: String,
    /// Distribution JSON (file or inline); repeatable for verygenpos.
    #[arg(long)]
    pub xi: Vec<String>,
    /// Lipschitz constant of the distribution.
    #[arg(long = "l-xi")]
    pub l_xi: Option<f64>,
    /// Certification mode; defaults to $JIGGLE_CERTIFICATION or sampled.
    #[arg(long)]
    pub mode: Option<String>,
}

#[derive(Debug, Args)]
pub struct JiggleArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[command(flatten)]
    pub relation: RelationArgs,
    #[arg(long)]
    pub epsilon: f64,
    /// First subdivision level tried.
    #[arg(long)]
    pub level_init: Option<u32>,
    #[arg(long, default_value_t = 30)]
    pub max_retries: u32,
    #[arg(long, default_value_t = 0.5)]
    pub eps_shrink: f64,
    /// Relative run: JSON with `k1`, `k2` (simplex lists) and `u1`, `u2`
    /// (regions).
    #[arg(long, conflicts_with = "charts")]
    pub relative: Option<String>,
    /// Bundle run: JSON list of charts.
    #[arg(long)]
    pub charts: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TriangulationArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Distribution JSON (file or inline); repeatable.
    #[arg(long, required = true)]
    pub xi: Vec<String>,
    #[arg(long)]
    pub epsilon: f64,
    /// Crystalline level of the output triangulation.
    #[arg(long, default_value_t = 0)]
    pub level: u32,
    #[arg(long, default_value_t = 30)]
    pub max_retries: u32,
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub emit_off: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Map JSON to check.
    #[arg(long, conflicts_with = "complex", required_unless_present = "complex")]
    pub map: Option<PathBuf>,
    /// Complex JSON; its identity map is checked.
    #[arg(long)]
    pub complex: Option<PathBuf>,
    #[command(flatten)]
    pub relation: RelationArgs,
    /// Input map the checked map should be C¹ close to.
    #[arg(long, requires = "epsilon")]
    pub against: Option<PathBuf>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Demo {
    /// A square grid against the horizontal line field.
    Thurston2d {
        /// Grid cells per side; the grid has `2 n²` triangles.
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        /// Smallest accepted angle between an edge and the horizontal, in
        /// radians; 0 accepts any non-horizontal edge.
        #[arg(long, default_value_t = 0.0)]
        min_angle: f64,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// The form `dz` on the unit cube made contact.
    Contact3d {
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

/// Failure of a command, split by exit status.
#[derive(Debug)]
pub enum CliError {
    /// Usage, parse or input error: exit 1.
    Usage(String),
    /// The result is not certified: exit 2.
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Verification(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Verification(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Verification(_)
            | Error::SweepExhausted { .. }
            | Error::RetriesExhausted { .. }
            | Error::LevelLimit(_)
            | Error::LevelTooLow { .. }
            | Error::InsufficientMargin(_)
            | Error::CoverTooCoarse(_) => CliError::Verification(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn certification(mode: Option<&str>) -> Result<Certification, CliError> {
    let env = std::env::var(CERTIFICATION_ENV).ok();
    match mode.or(env.as_deref()) {
        None => Ok(Certification::Sampled),
        Some("sampled") => Ok(Certification::Sampled),
        Some("lipschitz") => Ok(Certification::Lipschitz),
        Some(other) => Err(CliError::Usage(format!(
            "unknown certification mode `{other}` (expected sampled or lipschitz)"
        ))),
    }
}

/// Runs one parsed command line.
pub fn execute(cli: Cli) -> Result<(), CliError> {
    let g = commands::Globals { seed: cli.seed, lmax: cli.lmax };
    match cli.command {
        Command::Subdivide(a) => commands::subdivide(&g, a),
        Command::Color(a) => commands::color(a),
        Command::Metrics(a) => commands::metrics(a),
        Command::Linearize(a) => commands::linearize(a),
        Command::Jiggle(a) => commands::jiggle(&g, a),
        Command::JiggleTriangulation(a) => commands::jiggle_triangulation(&g, a),
        Command::Verify(a) => commands::verify(a),
        Command::Demo(Demo::Thurston2d { n, epsilon, min_angle, out_dir }) => {
            commands::demo_thurston(&g, n, epsilon, min_angle, out_dir)
        },
        Command::Demo(Demo::Contact3d { epsilon, out_dir }) => commands::demo_contact(&g, epsilon, out_dir),
    }
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
