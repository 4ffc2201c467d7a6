//! `deli` — generate, cluster, lift, plot and benchmark line datasets.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit status for bad flags or parameter combinations.
const EXIT_USAGE: u8 = 2;
const EXIT_RUNTIME: u8 = 1;

/// Raised for invalid flag combinations; maps to exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Parser)]
#[command(name = "deli", about = "Density-based clustering of lines and line segments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic dataset.
    Gen(GenArgs),
    /// Cluster a segment file.
    Cluster(ClusterArgs),
    /// Turn points with one missing coordinate into segments and profiles.
    Lift(LiftArgs),
    /// Render a clustering or a neighbourhood shape as SVG.
    Plot(PlotArgs),
    /// Time the draw loop on all-isolated data.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Dataset {
    Convex,
    Doughnut,
    /// 7-D points in four clusters plus noise, some with a missing value.
    Planted,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub dataset: Dataset,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV (stdout if omitted).
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// For `planted`: also write the planted labels here.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Auto,
    Csv,
    Geojson,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Segments CSV or GeoJSON file.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub format: InputFormat,
    /// GeoJSON crop box `min_x,min_y,max_x,max_y`.
    #[arg(long)]
    pub crop: Option<String>,
    /// JSON file with defaults for the flags below; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Neighbourhood version: 1 (distance), 2 (volume + profile), 3 (α + profile).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub version: Option<u8>,
    /// Cardinality threshold for core lines.
    #[arg(short = 'c', long = "cardinality")]
    pub cardinality: Option<usize>,
    /// Radius (version 1) or scaling factor (version 3)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Target neighbourhood volume (version 2)
    #[arg(long)]
    pub volume: Option<f64>,
    /// One profile for every line, e.g. `normal:0.5,0.04`.
    #[arg(long)]
    pub profile: Option<String>,
    /// JSON object mapping line id to profile string (or null).
    #[arg(long)]
    pub profiles: Option<PathBuf>,
    /// How --volume becomes a scaling factor: divide by the unit volume, or take the (n-1)th root so the volume is exact
    #[arg(long, value_enum)]
    pub alpha_mode: Option<config::AlphaModeArg>,
    /// literal: draw-loop clusters, which may overlap; expand: DBSCAN-style growth (default)
    #[arg(long, value_enum)]
    pub mode: Option<config::ModeArg>,
    /// Seed for the line draw order [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid size for the profile witness search [default: 64]
    #[arg(long)]
    pub search_samples: Option<usize>,
    /// Worker threads for neighbour queries
    #[arg(long)]
    pub threads: Option<usize>,
    /// Write the draw-loop trace as JSON lines.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Result document (JSON).
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Draw the clustering as SVG (planar data only)
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LiftArgs {
    /// Points CSV with `id` first; empty or `NA` marks a missing value.
    pub input: PathBuf,
    /// `K=uniform:LO,HI` or `K=LO,HI@family:params` with 1-based axis K.
    #[arg(long = "axis", required = true)]
    pub axes: Vec<String>,
    /// Segments CSV to write.
    #[arg(short, long)]
    pub out: PathBuf,
    /// Profile map (JSON) to write; defaults to the output path with extension `.profiles.json`.
    #[arg(long)]
    pub profiles_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Segments CSV to draw, coloured by `--results`.
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub results: Option<PathBuf>,
    /// Draw the neighbourhood of this profile around a unit segment instead.
    #[arg(long, conflicts_with = "input")]
    pub profile: Option<String>,
    #[arg(long, default_value_t = 0.25)]
    pub alpha: f64,
    #[arg(long)]
    pub svg: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [250usize, 500, 1000])]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    /// Also check the engine against an explicit relation matrix.
    #[arg(long)]
    pub verify: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DELI_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Cluster(a) => commands::cluster(a),
        Command::Lift(a) => commands::lift(a),
        Command::Plot(a) => commands::plot(a),
        Command::Bench(a) => commands::bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
