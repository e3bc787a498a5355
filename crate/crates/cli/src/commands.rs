use std::path::{Path, PathBuf};
use std::sync::Arc;

use depthedge::extract::{canny_depth_edges, dee_postprocess, gt_from_panoptic, CannyConfig, HysteresisConfig};
use depthedge::lidar::{density_curve, simulate_lidar, thin_to_curve, DensityCurve, LidarConfig};
use depthedge::loss::{depth_pyramid, edge_pyramid, total_loss, EdbConfig, LossConfig};
use depthedge::metrics::{evaluate_dataset, pr_sweep, EvalConfig, Manifest, ManifestRecord, PrCurve};
use depthedge::{io, json, par, EvalRegion, SparseDepth};
use depthedge_annotate::{ProposalSource, ServerConfig, Session};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::ConfigFile;
use crate::error::CliError;
use crate::{
    AnnotateArgs, Cli, Command, DeeArgs, DensityArgs, EvalArgs, ExtractArgs, LidarArgs, LossArgs,
    Outcome, PanopticArgs, Proposals, RegionPreset, ThinArgs,
};

struct Ctx {
    config: ConfigFile,
    seed: Option<u64>,
    threads: Option<usize>,
    out: Option<PathBuf>,
}

impl Ctx {
    fn out(&self) -> Result<&Path, CliError> {
        self.out
            .as_deref()
            .ok_or_else(|| CliError::Usage("--out is required for this subcommand".into()))
    }

    fn seed(&self) -> Result<u64, CliError> {
        match self.seed {
            Some(s) => Ok(s),
            None => self
                .config
                .get("seed")?
                .ok_or_else(|| CliError::Usage("a seed is required (--seed or config \"seed\")".into())),
        }
    }
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    let config = ConfigFile::load(cli.config.as_deref())?;
    let threads = match cli.threads {
        Some(t) => t.get(),
        None => config.get("threads")?,
    };
    let ctx = Ctx {
        config,
        seed: cli.seed,
        threads,
        out: cli.out,
    };
    match cli.command {
        Command::Version => {
            println!("{}", env!("CARGO_PKG_VERSION"));
            Ok(Outcome::Ok)
        }
        Command::Annotate(a) => annotate(&ctx, a),
        cmd => par::with_threads(ctx.threads, || dispatch(&ctx, cmd)),
    }
}

fn dispatch(ctx: &Ctx, cmd: Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::ExtractEdges(a) => extract_edges(ctx, a),
        Command::GtFromPanoptic(a) => panoptic(ctx, a),
        Command::DeePostprocess(a) => dee(ctx, a),
        Command::Loss(a) => loss(ctx, a),
        Command::Eval(a) => eval(ctx, a),
        Command::PrCurve(a) => pr_curve(ctx, a),
        Command::LidarSim(a) => lidar_sim(ctx, a),
        Command::Density(a) => density(ctx, a),
        Command::Thin(a) => thin(ctx, a),
        Command::Annotate(_) | Command::Version => unreachable!("handled by run"),
    }
}

/// Writes through a temporary sibling and renames, so readers never see a
/// half-written file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("not a file path: {}", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    io::write_file(&tmp, bytes)?;
    std::fs::rename(&tmp, path).map_err(|e| depthedge::Error::io(path, e))?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    write_atomic(path, json::to_canonical_json(value)?.as_bytes())
}

fn region_value(r: Option<RegionPreset>) -> Value {
    let region = match r {
        None => return Value::Null,
        Some(RegionPreset::Full) => EvalRegion::FULL,
        Some(RegionPreset::Bottom60) => EvalRegion::default(),
        Some(RegionPreset::Garg) => EvalRegion::bottom_60_garg_sides(),
    };
    serde_json::to_value(region).expect("region serializes")
}

fn extract_edges(ctx: &Ctx, a: ExtractArgs) -> Result<Outcome, CliError> {
    let out = ctx.out()?;
    let cfg: CannyConfig = ctx.config.resolve(json!({
        "th_low": a.th_low,
        "th_high": a.th_high,
        "smoothing_sigma": a.sigma,
    }))?;
    cfg.validate()?;
    let edges = canny_depth_edges(&io::load_depth(&a.depth)?, &cfg)?;
    write_atomic(out, &io::write_edges_png8(&edges)?)?;
    eprintln!("{} edge pixels", edges.len());
    Ok(Outcome::Ok)
}

fn panoptic(ctx: &Ctx, a: PanopticArgs) -> Result<Outcome, CliError> {
    let out = ctx.out()?;
    let excluded = match &a.exclusions {
        Some(p) => io::load_class_pairs(p)?,
        None => ctx.config.get("excluded_class_pairs")?.unwrap_or_default(),
    };
    let edges = gt_from_panoptic(&io::load_panoptic(&a.panoptic, &excluded)?);
    write_atomic(out, &io::write_edges_png8(&edges)?)?;
    eprintln!("{} edge pixels", edges.len());
    Ok(Outcome::Ok)
}

fn dee(ctx: &Ctx, a: DeeArgs) -> Result<Outcome, CliError> {
    let out = ctx.out()?;
    let cfg: HysteresisConfig = ctx.config.resolve(json!({"low": a.low, "high": a.high}))?;
    let probs = io::load_probs(&a.probs)?;
    let orient = io::read_pfm_grid(&io::read_file(&a.orient)?)?.map(|&v| f64::from(v));
    let edges = dee_postprocess(&probs, &orient, &cfg)?;
    write_atomic(out, &io::write_edges_png8(&edges)?)?;
    eprintln!("{} edge pixels", edges.len());
    Ok(Outcome::Ok)
}

#[derive(Debug, Deserialize)]
struct LossCmdConfig {
    #[serde(flatten)]
    loss: LossConfig,
    #[serde(flatten)]
    edb: EdbConfig,
}

#[derive(Debug, Serialize)]
struct LossReport {
    total: f64,
    depth_term: f64,
    edge_term: f64,
    alpha: f64,
    num_scales: usize,
    t_grad: f64,
    gradients: Vec<String>,
}

fn loss(ctx: &Ctx, a: LossArgs) -> Result<Outcome, CliError> {
    let out = ctx.out()?;
    let scales_from_file: Option<Value> = ctx.config.get("num_scales")?;
    let cfg: LossCmdConfig = ctx.config.resolve(json!({
        "alpha": a.alpha,
        "t_grad": a.t_grad,
        "num_scales": if scales_from_file.is_none() { Some(a.pred.len()) } else { None },
    }))?;
    if cfg.loss.num_scales != a.pred.len() {
        return Err(CliError::Usage(format!(
            "num_scales is {} but {} --pred files were given",
            cfg.loss.num_scales,
            a.pred.len()
        )));
    }
    cfg.loss.validate()?;
    cfg.edb.validate()?;
    let preds = a.pred.iter().map(|p| io::load_depth(p)).collect::<Result<Vec<_>, _>>()?;
    let gt_depth = depth_pyramid(&io::load_depth(&a.gt_depth)?, cfg.loss.num_scales)?;
    let gt_edges = edge_pyramid(&io::load_edges(&a.gt_edges)?, cfg.loss.num_scales);
    let res = total_loss(&preds, &gt_depth, &gt_edges, &cfg.loss, &cfg.edb)?;

    let mut files = Vec::new();
    for (s, g) in res.grad_wrt_depth.iter().enumerate() {
        let name = format!("grad_s{s}.pfm");
        files.push((name.clone(), io::write_pfm_grid(&g.map(|&v| v as f32))));
    }
    let report = LossReport {
        total: res.total,
        depth_term: res.depth_term,
        edge_term: res.edge_term,
        alpha: cfg.loss.alpha,
        num_scales: cfg.loss.num_scales,
        t_grad: cfg.edb.t_grad,
        gradients: files.iter().map(|(n, _)| n.clone()).collect(),
    };
    for (name, bytes) in &files {
        write_atomic(&out.join(name), bytes)?;
    }
    write_json(&out.join("loss.json"), &report)?;
    Ok(Outcome::Ok)
}

fn eval_config(ctx: &Ctx, a: &EvalArgs) -> Result<EvalConfig, CliError> {
    ctx.config.resolve(json!({
        "matching": {"t_e": a.t_e},
        "region": region_value(a.region),
        "seed": ctx.seed,
    }))
}

fn load_manifest(path: &Path) -> Result<Manifest, CliError> {
    Manifest::load(path).map_err(|e| CliError::Usage(format!("cannot load manifest: {e}")))
}

fn report_failures<'a>(failures: impl IntoIterator<Item = (&'a str, &'a str)>) -> Outcome {
    let mut partial = false;
    for (id, msg) in failures {
        eprintln!("item {id}: {msg}");
        partial = true;
    }
    if partial {
        Outcome::Partial
    } else {
        Outcome::Ok
    }
}

fn eval(ctx: &Ctx, a: EvalArgs) -> Result<Outcome, CliError> {
    let out = ctx.out()?;
    let cfg = eval_config(ctx, &a)?;
    cfg.validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let manifest = load_manifest(&a.manifest)?;
    let report = evaluate_dataset(&manifest, &cfg, ctx.threads)?;
    write_json(out, &report)?;
    Ok(report_failures(report.errors.iter().map(|e| (e.id.as_str(), e.message.as_str()))))
}

fn curve_for(manifest: &Manifest, rec: &ManifestRecord, cfg: &EvalConfig) -> depthedge::Result<PrCurve> {
    let pred_path = rec
        .pred_depth_path
        .as_ref()
        .ok_or_else(|| depthedge::Error::InvalidInput("record has no pred_depth_path".into()))?;
    let pred = io::load_depth(&manifest.resolve(pred_path))?;
    let gt = io::load_edges(&manifest.resolve(&rec.gt_edges_path))?;
    pr_sweep(&pred, &gt, &cfg.sweep, &cfg.matching, &cfg.region)
}

fn pr_curve(ctx: &Ctx, a: EvalArgs) -> Result<Outcome, CliError> {
    let out = ctx.out()?;
    let cfg = eval_config(ctx, &a)?;
    cfg.region.validate()?;
    let manifest = load_manifest(&a.manifest)?;
    let mut results: Vec<(String, depthedge::Result<PrCurve>)> =
        par::map_ordered(&manifest.records, |rec| (rec.id.clone(), curve_for(&manifest, rec, &cfg)));
    results.sort_by(|x, y| x.0.cmp(&y.0));
    let curves: Vec<PrCurve> = results.iter().filter_map(|(_, r)| r.as_ref().ok().cloned()).collect();
    let mean = if curves.is_empty() {
        PrCurve { points: Vec::new() }
    } else {
        PrCurve::mean(&curves)?
    };
    write_atomic(out, mean.to_csv().as_bytes())?;
    let failures: Vec<(String, String)> = results
        .iter()
        .filter_map(|(id, r)| r.as_ref().err().map(|e| (id.clone(), e.to_string())))
        .collect();
    Ok(report_failures(failures.iter().map(|(i, m)| (i.as_str(), m.as_str()))))
}

fn lidar_sim(ctx: &Ctx, a: LidarArgs) -> Result<Outcome, CliError> {
    let out = ctx.out()?;
    let cfg: LidarConfig = ctx.config.resolve(json!({
        "num_beams": a.num_beams,
        "horiz_step": a.horiz_step,
        "intrinsics": {"fx": a.fx, "fy": a.fy, "cx": a.cx, "cy": a.cy},
    }))?;
    cfg.validate()?;
    let lidar = simulate_lidar(&io::load_depth(&a.depth)?, &cfg)?;
    write_atomic(out, &io::write_depth_png16(&lidar.to_depth_map()?)?)?;
    eprintln!("{} samples", lidar.len());
    Ok(Outcome::Ok)
}

#[derive(Debug, Deserialize)]
#[serde(default)]
struct DensityCmdConfig {
    max_d: usize,
    region: EvalRegion,
}

impl Default for DensityCmdConfig {
    fn default() -> Self {
        DensityCmdConfig {
            max_d: 20,
            region: EvalRegion::FULL,
        }
    }
}

fn load_sparse(path: &Path) -> Result<SparseDepth, CliError> {
    Ok(SparseDepth::from_depth_map(&io::load_depth(path)?))
}

fn density(ctx: &Ctx, a: DensityArgs) -> Result<Outcome, CliError> {
    let out = ctx.out()?;
    let cfg: DensityCmdConfig = ctx
        .config
        .resolve(json!({"max_d": a.max_d, "region": region_value(a.region)}))?;
    cfg.region.validate()?;
    let curve = density_curve(&load_sparse(&a.lidar)?, &io::load_edges(&a.edges)?, cfg.max_d, &cfg.region)?;
    write_json(out, &curve)?;
    Ok(Outcome::Ok)
}

fn thin(ctx: &Ctx, a: ThinArgs) -> Result<Outcome, CliError> {
    let out = ctx.out()?;
    let seed = ctx.seed()?;
    let text = std::fs::read_to_string(&a.target).map_err(|e| depthedge::Error::io(&a.target, e))?;
    let target: DensityCurve = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("target curve {}: {e}", a.target.display())))?;
    let lidar = load_sparse(&a.lidar)?;
    let thinned = thin_to_curve(&lidar, &io::load_edges(&a.edges)?, &target, seed)?;
    write_atomic(out, &io::write_depth_png16(&thinned.to_depth_map()?)?)?;
    eprintln!("kept {} of {} samples", thinned.len(), lidar.len());
    Ok(Outcome::Ok)
}

fn annotate(_ctx: &Ctx, a: AnnotateArgs) -> Result<Outcome, CliError> {
    let source = match a.proposals {
        Proposals::Panoptic => ProposalSource::Panoptic,
        Proposals::EdgeMapFiles => ProposalSource::EdgeMapFiles,
    };
    let session = Arc::new(Session::init(&a.root, source)?);
    let cfg = ServerConfig {
        port: a.port,
        ui_dir: a.ui_dir,
    };
    eprintln!("serving {} items on http://127.0.0.1:{}", session.len(), cfg.port);
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(depthedge_annotate::serve(session, cfg))?;
    Ok(Outcome::Ok)
}
