//! Dataset-level evaluation driven by a JSON manifest.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::auc::{AucRange, AucResult};
use super::depth::{are, delta_acc, ord, OrdConfig};
use super::matching::MatchConfig;
use super::pr::{default_sweep, pr_sweep, PrCurve, PrPoint};
use crate::error::{Error, Result};
use crate::extract::CannyConfig;
use crate::io;
use crate::model::{DepthMap, EdgeMap, SparseDepth};
use crate::par;
use crate::region::{Crop, EvalRegion};

/// One manifest entry. Relative paths are resolved against the manifest's
/// directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pred_depth_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt_depth_path: Option<PathBuf>,
    pub gt_edges_path: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub base_dir: PathBuf,
    pub records: Vec<ManifestRecord>,
}

impl Manifest {
    pub fn from_json(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let records: Vec<ManifestRecord> = serde_json::from_str(text)?;
        let mut seen = HashSet::new();
        for r in &records {
            if !seen.insert(r.id.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate manifest id {:?}", r.id)));
            }
        }
        Ok(Manifest {
            base_dir: base_dir.into(),
            records,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Manifest::from_json(&text, base)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    #[serde(default)]
    pub region: EvalRegion,
    #[serde(default)]
    pub matching: MatchConfig,
    #[serde(default = "default_sweep")]
    pub sweep: Vec<CannyConfig>,
    #[serde(default)]
    pub ord: OrdConfig,
    #[serde(default)]
    pub auc_range: AucRange,
    /// Seed for ORD pair sampling. Required.
    #[serde(default)]
    pub seed: Option<u64>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            region: EvalRegion::default(),
            matching: MatchConfig::default(),
            sweep: default_sweep(),
            ord: OrdConfig::default(),
            auc_range: AucRange::default(),
            seed: None,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<u64> {
        self.region.validate()?;
        if self.sweep.is_empty() {
            return Err(Error::Config("empty Canny sweep".into()));
        }
        for c in &self.sweep {
            c.validate()?;
        }
        if let AucRange::Fixed { a, b } = self.auc_range {
            if !(a < b) {
                return Err(Error::Config(format!("AUC range needs a < b, got [{a}, {b}]")));
            }
        }
        self.seed
            .ok_or_else(|| Error::Config("a seed is required for ORD sampling".into()))
    }
}

pub const DELTA_THRESHOLDS: [f64; 3] = [1.25, 1.25 * 1.25, 1.25 * 1.25 * 1.25];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthMetrics {
    pub are: f64,
    pub ord: f64,
    pub delta_1: f64,
    pub delta_2: f64,
    pub delta_3: f64,
    pub num_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageMetrics {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<DepthMetrics>,
    pub auc: AucResult,
    pub pr_curve: Vec<PrPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemError {
    pub id: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub empty_prediction_precision: f64,
    pub empty_ground_truth_recall: f64,
    pub auc_outside_curve: String,
    pub dataset_pr_aggregation: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            empty_prediction_precision: 1.0,
            empty_ground_truth_recall: 1.0,
            auc_outside_curve: "zero".into(),
            dataset_pr_aggregation: "mean of per-image precision and recall".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub num_images: usize,
    pub are: Option<f64>,
    pub ord: Option<f64>,
    pub delta_1: Option<f64>,
    pub delta_2: Option<f64>,
    pub delta_3: Option<f64>,
    pub auc: Option<AucResult>,
    pub pr_curve: Vec<PrPoint>,
    pub per_image: Vec<ImageMetrics>,
    pub errors: Vec<ItemError>,
    pub conventions: Conventions,
}

impl MetricsReport {
    pub fn curve(&self) -> PrCurve {
        PrCurve {
            points: self.pr_curve.clone(),
        }
    }
}

/// Stable per-image seed derived from the run seed and the image id, so
/// results do not depend on manifest order.
pub fn image_seed(seed: u64, id: &str) -> u64 {
    // FNV-1a over the id, then a splitmix64 finalizer
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in id.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = seed ^ h;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Metrics for one image. Depth metrics are computed only when GT depth is
/// supplied.
pub fn evaluate_image(
    id: &str,
    pred: &DepthMap,
    gt_depth: Option<&DepthMap>,
    gt_edges: &EdgeMap,
    cfg: &EvalConfig,
    seed: u64,
) -> Result<ImageMetrics> {
    let depth = match gt_depth {
        Some(gt) => {
            let gt = SparseDepth::from_depth_map(gt);
            let region = &cfg.region;
            let num_samples = gt.crop(region)?.len();
            Some(DepthMetrics {
                are: are(pred, &gt, region)?,
                ord: ord(pred, &gt, &cfg.ord, image_seed(seed, id), region)?,
                delta_1: delta_acc(pred, &gt, DELTA_THRESHOLDS[0], region)?,
                delta_2: delta_acc(pred, &gt, DELTA_THRESHOLDS[1], region)?,
                delta_3: delta_acc(pred, &gt, DELTA_THRESHOLDS[2], region)?,
                num_samples,
            })
        }
        None => None,
    };
    let curve = pr_sweep(pred, gt_edges, &cfg.sweep, &cfg.matching, &cfg.region)?;
    Ok(ImageMetrics {
        id: id.to_string(),
        depth,
        auc: curve.auc(cfg.auc_range)?,
        pr_curve: curve.points,
    })
}

fn load_record(manifest: &Manifest, rec: &ManifestRecord) -> Result<(DepthMap, Option<DepthMap>, EdgeMap)> {
    let pred_path = rec
        .pred_depth_path
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("record has no pred_depth_path".into()))?;
    let pred = io::load_depth(&manifest.resolve(pred_path))?;
    let gt_depth = match &rec.gt_depth_path {
        Some(p) => Some(io::load_depth(&manifest.resolve(p))?),
        None => None,
    };
    let gt_edges = io::load_edges(&manifest.resolve(&rec.gt_edges_path))?;
    Ok((pred, gt_depth, gt_edges))
}

/// Combines per-image outcomes into a report. Outcomes are ordered by id
/// before any reduction so the result is independent of input order.
pub fn aggregate(
    outcomes: Vec<(String, Result<ImageMetrics>)>,
    auc_range: AucRange,
) -> Result<MetricsReport> {
    let mut outcomes = outcomes;
    outcomes.sort_by(|a, b| a.0.cmp(&b.0));
    let mut per_image = Vec::new();
    let mut errors = Vec::new();
    for (id, r) in outcomes {
        match r {
            Ok(m) => per_image.push(m),
            Err(e) => errors.push(ItemError {
                id,
                message: e.to_string(),
            }),
        }
    }
    let depth: Vec<&DepthMetrics> = per_image.iter().filter_map(|m| m.depth.as_ref()).collect();
    let mean = |f: fn(&DepthMetrics) -> f64| -> Option<f64> {
        if depth.is_empty() {
            None
        } else {
            Some(depth.iter().map(|d| f(d)).sum::<f64>() / depth.len() as f64)
        }
    };
    let (pr_curve, auc) = if per_image.is_empty() {
        (Vec::new(), None)
    } else {
        let curves: Vec<PrCurve> = per_image
            .iter()
            .map(|m| PrCurve {
                points: m.pr_curve.clone(),
            })
            .collect();
        let curve = PrCurve::mean(&curves)?;
        let auc = curve.auc(auc_range)?;
        (curve.points, Some(auc))
    };
    Ok(MetricsReport {
        num_images: per_image.len(),
        are: mean(|d| d.are),
        ord: mean(|d| d.ord),
        delta_1: mean(|d| d.delta_1),
        delta_2: mean(|d| d.delta_2),
        delta_3: mean(|d| d.delta_3),
        auc,
        pr_curve,
        per_image,
        errors,
        conventions: Conventions::default(),
    })
}

/// Evaluates every manifest record, in parallel when the `parallel` feature
/// is enabled. Unreadable or failing records are reported in
/// `MetricsReport::errors` and do not stop the run.
pub fn evaluate_dataset(manifest: &Manifest, cfg: &EvalConfig, threads: Option<usize>) -> Result<MetricsReport> {
    let seed = cfg.validate()?;
    if manifest.records.is_empty() {
        return Err(Error::InvalidInput("empty manifest".into()));
    }
    let outcomes = par::with_threads(threads, || {
        par::map_ordered(&manifest.records, |rec| {
            let r = load_record(manifest, rec)
                .and_then(|(pred, gt, edges)| evaluate_image(&rec.id, &pred, gt.as_ref(), &edges, cfg, seed));
            (rec.id.clone(), r)
        })
    });
    aggregate(outcomes, cfg.auc_range)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_rejects_duplicate_ids() {
        let text = r#"[{"id":"a","gt_edges_path":"x.png"},{"id":"a","gt_edges_path":"y.png"}]"#;
        assert!(Manifest::from_json(text, ".").is_err());
    }

    #[test]
    fn manifest_optional_fields() {
        let text = r#"[{"id":"a","pred_depth_path":"p.pfm","gt_edges_path":"e.png"}]"#;
        let m = Manifest::from_json(text, "/data").unwrap();
        assert_eq!(m.records[0].gt_depth_path, None);
        assert_eq!(m.resolve(Path::new("e.png")), PathBuf::from("/data/e.png"));
    }

    #[test]
    fn seed_is_required() {
        assert!(EvalConfig::default().validate().is_err());
        let cfg = EvalConfig {
            seed: Some(3),
            ..EvalConfig::default()
        };
        assert_eq!(cfg.validate().unwrap(), 3);
    }

    #[test]
    fn image_seeds_differ_by_id() {
        assert_ne!(image_seed(1, "a"), image_seed(1, "b"));
        assert_eq!(image_seed(1, "a"), image_seed(1, "a"));
    }
}
