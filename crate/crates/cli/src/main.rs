mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

/// Depth-edge extraction, evaluation, edge loss and LIDAR density tools.
#[derive(Debug, Parser)]
#[command(name = "depthedge", version)]
pub struct Cli {
    /// JSON configuration; explicit flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for stochastic steps (ORD pair sampling, thinning).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads: a count or `auto`.
    #[arg(long, global = true, value_parser = parse_threads)]
    threads: Option<Threads>,
    /// Output file, or output directory for `loss`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threads {
    Auto,
    Count(usize),
}

impl Threads {
    pub fn get(self) -> Option<usize> {
        match self {
            Threads::Auto => None,
            Threads::Count(n) => Some(n),
        }
    }
}

fn parse_threads(s: &str) -> Result<Threads, String> {
    if s == "auto" {
        return Ok(Threads::Auto);
    }
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(Threads::Count(n)),
        _ => Err(format!("expected a positive count or `auto`, got {s:?}")),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Canny edges of a depth map with thresholds in meters per pixel.
    ExtractEdges(ExtractArgs),
    /// Ground-truth edges from panoptic labels.
    GtFromPanoptic(PanopticArgs),
    /// Thin edges from a dense edge-probability map.
    DeePostprocess(DeeArgs),
    /// Edge-aware loss and its gradient for one prediction.
    Loss(LossArgs),
    /// Dataset evaluation report.
    Eval(EvalArgs),
    /// Mean precision/recall curve as CSV.
    PrCurve(EvalArgs),
    /// Simulated LIDAR samples from dense depth.
    LidarSim(LidarArgs),
    /// LIDAR density against distance to the nearest edge.
    Density(DensityArgs),
    /// Thin LIDAR samples towards a target density curve.
    Thin(ThinArgs),
    /// Run the annotation service.
    Annotate(AnnotateArgs),
    /// Print the version.
    Version,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Depth map (`.png` 16-bit or `.pfm`).
    #[arg(long)]
    pub depth: PathBuf,
    #[arg(long)]
    pub th_low: Option<f64>,
    #[arg(long)]
    pub th_high: Option<f64>,
    /// Gaussian smoothing in pixels before the gradient.
    #[arg(long)]
    pub sigma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PanopticArgs {
    /// Two-channel 16-bit PNG: segment id, class id.
    #[arg(long)]
    pub panoptic: PathBuf,
    /// JSON list of excluded class pairs, e.g. `[[7, 8]]`.
    #[arg(long)]
    pub exclusions: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DeeArgs {
    /// Edge probabilities as a 16-bit PNG.
    #[arg(long)]
    pub probs: PathBuf,
    /// Edge normal orientation in radians as PFM.
    #[arg(long)]
    pub orient: PathBuf,
    #[arg(long)]
    pub low: Option<f64>,
    #[arg(long)]
    pub high: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LossArgs {
    /// Predicted depth (PFM), one per scale, full resolution first.
    #[arg(long, required = true, num_args = 1..)]
    pub pred: Vec<PathBuf>,
    /// Ground-truth depth at full resolution.
    #[arg(long)]
    pub gt_depth: PathBuf,
    /// Ground-truth edges at full resolution.
    #[arg(long)]
    pub gt_edges: PathBuf,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub t_grad: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Evaluation manifest (JSON list of records).
    #[arg(long)]
    pub manifest: PathBuf,
    /// Matching radius in pixels.
    #[arg(long)]
    pub t_e: Option<f64>,
    #[arg(long, value_enum)]
    pub region: Option<RegionPreset>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RegionPreset {
    /// Whole frame.
    Full,
    /// Bottom 60% of rows.
    Bottom60,
    /// Bottom 60% of rows with the side crop of Garg et al.
    Garg,
}

#[derive(Debug, Args)]
pub struct LidarArgs {
    /// Dense ground-truth depth.
    #[arg(long)]
    pub depth: PathBuf,
    #[arg(long)]
    pub num_beams: Option<usize>,
    /// Degrees between rays.
    #[arg(long)]
    pub horiz_step: Option<f64>,
    #[arg(long)]
    pub fx: Option<f64>,
    #[arg(long)]
    pub fy: Option<f64>,
    #[arg(long)]
    pub cx: Option<f64>,
    #[arg(long)]
    pub cy: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// Sparse depth as a 16-bit PNG.
    #[arg(long)]
    pub lidar: PathBuf,
    #[arg(long)]
    pub edges: PathBuf,
    /// Largest distance bin in pixels.
    #[arg(long)]
    pub max_d: Option<usize>,
    #[arg(long, value_enum)]
    pub region: Option<RegionPreset>,
}

#[derive(Debug, Args)]
pub struct ThinArgs {
    #[arg(long)]
    pub lidar: PathBuf,
    #[arg(long)]
    pub edges: PathBuf,
    /// Target density curve (JSON).
    #[arg(long)]
    pub target: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnnotateArgs {
    /// Dataset directory containing `manifest.json`.
    #[arg(long)]
    pub root: PathBuf,
    #[arg(long, default_value_t = depthedge_annotate::DEFAULT_PORT)]
    pub port: u16,
    /// Preferred source of initial edges.
    #[arg(long, value_enum, default_value_t = Proposals::Panoptic)]
    pub proposals: Proposals,
    /// Built UI assets to serve at `/`.
    #[arg(long)]
    pub ui_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Proposals {
    Panoptic,
    EdgeMapFiles,
}

/// Result of a subcommand that ran to completion.
pub enum Outcome {
    Ok,
    /// Some items failed; the rest was written.
    Partial,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("run `depthedge --help` for usage");
            }
            ExitCode::from(2)
        }
    }
}
