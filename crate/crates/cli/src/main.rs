mod commands;
mod export;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use strip3d::rational::parse_rational;
use strip3d::ssp::Backend;
use strip3d::Rational;

#[derive(Debug, Parser)]
#[command(name = "strip3d", version, about = "3D strip packing: solve, certify, oracle, generate, export")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pack an instance and write the packing.
    Solve(SolveArgs),
    /// Pack an instance and report lower bounds and ratios.
    Certify(SolveArgs),
    /// Exact optimum of a small instance.
    Oracle(OracleArgs),
    /// Generate a seeded instance.
    Gen(GenArgs),
    /// Export a packing as JSON, per-layer SVG, or OBJ.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    #[value(name = "3ssp")]
    Ssp,
    SquareAptas,
    Mnfdh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Svg,
    Obj,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeneratorName {
    Uniform,
    HarmonicAdversarial,
    SquareBase,
    GuillotineCut,
}

pub const DEFAULT_NODES: u64 = 5_000_000;

pub fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct Knobs {
    #[arg(long, value_enum, default_value = "3ssp")]
    pub algorithm: Algorithm,
    /// Number of harmonic types.
    #[arg(long, default_value_t = 12)]
    pub k: u64,
    /// Segment height.
    #[arg(long, default_value = "16", value_parser = rational_arg)]
    pub c: Rational,
    /// Accuracy; defaults to 1/10 for the 1D backend and 1/12 for square-aptas.
    #[arg(long, value_parser = rational_arg)]
    pub epsilon: Option<Rational>,
    #[arg(long, default_value = "ffd")]
    pub backend: Backend,
    /// Number of rounding groups for square-aptas; default from epsilon.
    #[arg(long)]
    pub groups: Option<u64>,
    /// Node limit for exact searches.
    #[arg(long, default_value_t = DEFAULT_NODES)]
    pub budget_nodes: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// Instance file.
    #[arg(required_unless_present = "glob", conflicts_with = "glob")]
    pub instance: Option<PathBuf>,
    /// Process every matching instance file concurrently.
    #[arg(long)]
    pub glob: Option<String>,
    #[command(flatten)]
    pub knobs: Knobs,
    /// Output file, or directory in batch mode.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    pub instance: PathBuf,
    #[arg(long, default_value_t = DEFAULT_NODES)]
    pub budget_nodes: u64,
    /// Largest instance the search accepts.
    #[arg(long, default_value_t = 5)]
    pub max_boxes: usize,
    /// Where to write the optimal packing.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub generator: GeneratorName,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = 0.05)]
    pub lo: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hi: f64,
    /// Largest harmonic type for harmonic-adversarial.
    #[arg(long, default_value_t = 6)]
    pub max_type: u64,
    /// Offset above `1/(t+1)` for harmonic-adversarial.
    #[arg(long, default_value = "1/100", value_parser = rational_arg)]
    pub eta: Rational,
    /// Height of the cut cuboid for guillotine-cut.
    #[arg(long, default_value_t = 3)]
    pub height: u32,
    #[arg(long, default_value_t = 20)]
    pub cuts: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExportArgs {
    pub instance: PathBuf,
    /// Packing to export; when absent the instance is solved first.
    #[arg(long)]
    pub packing: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "svg")]
    pub format: Format,
    /// Slab thickness of SVG layers; defaults to `--c`.
    #[arg(long, value_parser = rational_arg)]
    pub layer: Option<Rational>,
    #[command(flatten)]
    pub knobs: Knobs,
    /// Output file; for SVG a directory receiving `layer_NNN.svg`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
