mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use midscribe_core::verify::TANGENCY_TOL;

/// Edge-tangent polyhedra for smooth strictly convex bodies.
#[derive(Debug, Parser)]
#[command(name = "midscribe", version)]
pub struct Cli {
    /// Record wall-clock time in the run manifest (makes outputs non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalized orthogonal circle pattern of the complex, as JSON.
    Pack(PackArgs),
    /// Midscribed polyhedron for a body, as OFF plus a JSON report.
    Midscribe(MidscribeArgs),
    /// Check a configuration against a body.
    Verify(VerifyArgs),
    /// Classify solutions over a grid of third marks.
    Sweep(SweepArgs),
    /// Triangulated boundary mesh of a body, as OFF.
    ExportBody(ExportArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Complex as an .off or .json file, or a seed name (tetrahedron, cube, ...).
    #[arg(long)]
    pub complex: PathBuf,
    /// Face and three consecutive boundary edges, `face:e1,e2,e3`.
    #[arg(long)]
    pub frame: Option<String>,
}

#[derive(Debug, Args)]
pub struct PackArgs {
    #[command(flatten)]
    pub common: Common,
    /// Three chart coordinates `z1,z2,z3`.
    #[arg(long)]
    pub marks: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// `ball`, `ellipsoid:a=..,b=..` or `superellipsoid:p=..,a=..,b=..`.
    #[arg(long, default_value = "ball")]
    pub body: String,
    /// Newton residual tolerance.
    #[arg(long)]
    pub solver_tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Accept singular Newton steps (minimum-norm).
    #[arg(long)]
    pub allow_singular: bool,
}

#[derive(Debug, Args)]
pub struct MidscribeArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub solve: SolveArgs,
    #[arg(long)]
    pub marks: Option<String>,
    /// Verification tolerance.
    #[arg(long, default_value_t = TANGENCY_TOL)]
    pub tol: f64,
    /// OFF output; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON report.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Perturbed restarts for the rigidity probe.
    #[arg(long, default_value_t = 0)]
    pub starts: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub perturbation: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value = "ball")]
    pub body: String,
    /// Configuration JSON, or a midscribe report containing one.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = TANGENCY_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub solve: SolveArgs,
    /// `z1,z2,c`: fixed first two marks and the grid center for the third.
    #[arg(long)]
    pub marks: String,
    #[arg(long, default_value_t = 8)]
    pub grid: usize,
    /// Half-width of the square grid around the center.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long, default_value = "ball")]
    pub body: String,
    /// Latitude bands; longitudes are twice as many.
    #[arg(long, default_value_t = 32)]
    pub resolution: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
