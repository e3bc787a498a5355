use serde::{Deserialize, Serialize};

use super::auc::{auc_with_range, AucRange, AucResult};
use super::matching::{match_edges, MatchConfig};
use crate::error::{Error, Result};
use crate::extract::{canny_depth_edges, CannyConfig};
use crate::json::format_float;
use crate::model::{DepthMap, EdgeMap};
use crate::region::{Crop, EvalRegion};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    /// Sweep parameter (the Canny high threshold, m/px).
    pub param: f64,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrCurve {
    pub points: Vec<PrPoint>,
}

/// Thirty Canny configurations, `th_high` geometric from 0.5 to 32 m/px and
/// `th_low = 0.8 * th_high`.
pub fn default_sweep() -> Vec<CannyConfig> {
    let n = 30;
    (0..n)
        .map(|i| {
            let th_high = 0.5 * 64f64.powf(i as f64 / (n - 1) as f64);
            CannyConfig::new(0.8 * th_high, th_high)
        })
        .collect()
}

/// Drops configurations whose `th_high` repeats an earlier one.
pub fn dedup_sweep(sweep: &[CannyConfig]) -> Vec<CannyConfig> {
    let mut out: Vec<CannyConfig> = Vec::with_capacity(sweep.len());
    for c in sweep {
        if !out.iter().any(|o| o.th_high == c.th_high) {
            out.push(*c);
        }
    }
    out
}

/// Precision/recall of Canny edges of `pred_depth` against `gt_edges` for
/// every sweep configuration. Edges are extracted on the full frame and
/// both edge sets are then cropped to `region`.
pub fn pr_sweep(
    pred_depth: &DepthMap,
    gt_edges: &EdgeMap,
    sweep: &[CannyConfig],
    cfg: &MatchConfig,
    region: &EvalRegion,
) -> Result<PrCurve> {
    if sweep.is_empty() {
        return Err(Error::Config("empty Canny sweep".into()));
    }
    if pred_depth.dims() != gt_edges.dims() {
        return Err(Error::shape(gt_edges.dims(), pred_depth.dims()));
    }
    let gt = gt_edges.crop(region)?;
    let points = dedup_sweep(sweep)
        .iter()
        .map(|c| {
            let pred = canny_depth_edges(pred_depth, c)?.crop(region)?;
            let m = match_edges(&pred, &gt, cfg)?;
            Ok(PrPoint {
                param: c.th_high,
                precision: m.precision,
                recall: m.recall,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PrCurve { points })
}

impl PrCurve {
    /// Point-wise mean of per-image curves computed over the same sweep, in
    /// the given order.
    pub fn mean(curves: &[PrCurve]) -> Result<PrCurve> {
        let first = curves
            .first()
            .ok_or_else(|| Error::InvalidInput("no curves to average".into()))?;
        let n = curves.len() as f64;
        let mut points = Vec::with_capacity(first.points.len());
        for (k, p0) in first.points.iter().enumerate() {
            let (mut sp, mut sr) = (0.0, 0.0);
            for c in curves {
                let p = c.points.get(k).filter(|p| p.param == p0.param).ok_or_else(|| {
                    Error::InvalidInput("curves were computed over different sweeps".into())
                })?;
                sp += p.precision;
                sr += p.recall;
            }
            points.push(PrPoint {
                param: p0.param,
                precision: sp / n,
                recall: sr / n,
            });
        }
        Ok(PrCurve { points })
    }

    pub fn auc(&self, range: AucRange) -> Result<AucResult> {
        let pts: Vec<_> = self.points.iter().map(|p| (p.precision, p.recall)).collect();
        auc_with_range(&pts, range)
    }

    /// CSV with header `param,precision,recall`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("param,precision,recall\n");
        for p in &self.points {
            s.push_str(&format!(
                "{},{},{}\n",
                format_float(p.param),
                format_float(p.precision),
                format_float(p.recall)
            ));
        }
        s
    }
}
