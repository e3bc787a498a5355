use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::{DepthMap, EdgeMap};

use super::bbce::bbce_eval;
use super::depth::l1_eval;
use super::edb::edb_forward;
use super::orientation::{orientation_from_edges, EdbConfig};
use super::pyramid::scale_dims;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DepthLossKind {
    #[default]
    L1,
}

/// Weights of the combined objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LossConfig {
    /// Weight of the edge term.
    pub alpha: f64,
    pub num_scales: usize,
    pub depth_loss_kind: DepthLossKind,
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig {
            alpha: 0.1,
            num_scales: 1,
            depth_loss_kind: DepthLossKind::L1,
        }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0) {
            return Err(Error::Config(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if self.num_scales == 0 {
            return Err(Error::Config("num_scales must be >= 1".into()));
        }
        Ok(())
    }
}

/// Loss value, its two terms, and the gradient with respect to each
/// predicted scale (index 0 is full resolution).
#[derive(Debug, Clone)]
pub struct LossOutput {
    pub total: f64,
    pub depth_term: f64,
    pub edge_term: f64,
    pub grad_wrt_depth: Vec<Grid<f64>>,
}

/// Multi-scale depth term `(1/S) sum_s L1_s` and its gradient.
pub fn multiscale_depth_term(
    pred: &[DepthMap],
    gt_depth: &[DepthMap],
) -> Result<(f64, Vec<Grid<f64>>)> {
    let s = pred.len() as f64;
    let mut sum = 0.0;
    let mut grads = Vec::with_capacity(pred.len());
    for (p, g) in pred.iter().zip(gt_depth) {
        let eval = l1_eval(p, g)?;
        sum += eval.loss;
        grads.push(eval.grad.map(|v| v / s));
    }
    Ok((sum / s, grads))
}

/// Multi-scale edge term `(1/S) sum_s BBCE(EDB(D_s), E_s)` and its gradient.
pub fn multiscale_edge_term(
    pred: &[DepthMap],
    gt_edges: &[EdgeMap],
    edb: &EdbConfig,
) -> Result<(f64, Vec<Grid<f64>>)> {
    let s = pred.len() as f64;
    let mut sum = 0.0;
    let mut grads = Vec::with_capacity(pred.len());
    for (p, e) in pred.iter().zip(gt_edges) {
        let of = orientation_from_edges(e, edb);
        let fwd = edb_forward(p, &of, edb)?;
        let eval = bbce_eval(&fwd.probs, e, &fwd.domain)?;
        sum += eval.loss;
        let (h, w) = p.dims();
        let mut grad = Grid::filled(h, w, 0.0);
        for r in 0..h {
            for c in 0..w {
                let dl_dp = *eval.dloss_dprob.get(r, c);
                if dl_dp == 0.0 {
                    continue;
                }
                let prob = fwd.probs.get(r, c);
                let upstream = dl_dp * prob * (1.0 - prob) / s;
                fwd.gradient.backprop_abs(r, c, upstream, &mut grad);
            }
        }
        grads.push(grad);
    }
    Ok((sum / s, grads))
}

fn check_shapes(pred: &[DepthMap], gt_depth: &[DepthMap], gt_edges: &[EdgeMap], cfg: &LossConfig) -> Result<()> {
    for (what, n) in [("prediction", pred.len()), ("GT depth", gt_depth.len()), ("GT edge", gt_edges.len())] {
        if n != cfg.num_scales {
            return Err(Error::InvalidInput(format!(
                "{what} pyramid has {n} scales, config expects {}",
                cfg.num_scales
            )));
        }
    }
    let (h, w) = pred[0].dims();
    for s in 0..cfg.num_scales {
        let want = scale_dims(h, w, s);
        for got in [pred[s].dims(), gt_depth[s].dims(), gt_edges[s].dims()] {
            if got != want {
                return Err(Error::shape(want, got));
            }
        }
    }
    Ok(())
}

/// Combined objective `depth_term + alpha * edge_term` with the analytic
/// gradient with respect to every predicted scale.
///
/// Each of `pred`, `gt_depth` and `gt_edges` holds one entry per scale;
/// scale `s` must be `ceil(H / 2^s) x ceil(W / 2^s)`. See
/// [`depth_pyramid`](super::depth_pyramid) and
/// [`edge_pyramid`](super::edge_pyramid) for building targets from
/// full-resolution ground truth.
pub fn total_loss(
    pred: &[DepthMap],
    gt_depth: &[DepthMap],
    gt_edges: &[EdgeMap],
    cfg: &LossConfig,
    edb: &EdbConfig,
) -> Result<LossOutput> {
    cfg.validate()?;
    edb.validate()?;
    check_shapes(pred, gt_depth, gt_edges, cfg)?;
    let (depth_term, depth_grads) = multiscale_depth_term(pred, gt_depth)?;
    let (edge_term, edge_grads) = multiscale_edge_term(pred, gt_edges, edb)?;
    let total = depth_term + cfg.alpha * edge_term;
    let grad_wrt_depth = depth_grads
        .into_iter()
        .zip(edge_grads)
        .map(|(gd, ge)| {
            let (h, w) = gd.dims();
            Grid::from_fn(h, w, |r, c| gd.get(r, c) + cfg.alpha * ge.get(r, c))
        })
        .collect();
    Ok(LossOutput {
        total,
        depth_term,
        edge_term,
        grad_wrt_depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::{depth_pyramid, edge_pyramid};

    fn scene(h: usize, w: usize) -> (DepthMap, EdgeMap) {
        let d = DepthMap::from_fn(h, w, |_, c| if c < w / 2 { 10.0 } else { 25.0 }).unwrap();
        let e = EdgeMap::from_pixels(h, w, (0..h).map(|r| (r, w / 2 - 1))).unwrap();
        (d, e)
    }

    #[test]
    fn alpha_zero_is_pure_depth_term() {
        let (d, e) = scene(16, 16);
        let pred = DepthMap::from_fn(16, 16, |r, c| 5.0 + (r + c) as f64).unwrap();
        let cfg = LossConfig {
            alpha: 0.0,
            num_scales: 2,
            ..LossConfig::default()
        };
        let out = total_loss(
            &depth_pyramid(&pred, 2).unwrap(),
            &depth_pyramid(&d, 2).unwrap(),
            &edge_pyramid(&e, 2),
            &cfg,
            &EdbConfig::default(),
        )
        .unwrap();
        assert_eq!(out.total, out.depth_term);
        assert!(out.edge_term > 0.0);
    }

    #[test]
    fn terms_combine_bit_for_bit() {
        let (d, e) = scene(16, 12);
        let pred = DepthMap::from_fn(16, 12, |r, c| 3.0 + ((r * 5 + c * 3) % 7) as f64).unwrap();
        let cfg = LossConfig {
            alpha: 0.37,
            num_scales: 3,
            ..LossConfig::default()
        };
        let edb = EdbConfig::default();
        let preds = depth_pyramid(&pred, 3).unwrap();
        let gts = depth_pyramid(&d, 3).unwrap();
        let edges = edge_pyramid(&e, 3);
        let out = total_loss(&preds, &gts, &edges, &cfg, &edb).unwrap();
        let (dt, _) = multiscale_depth_term(&preds, &gts).unwrap();
        let (et, _) = multiscale_edge_term(&preds, &edges, &edb).unwrap();
        assert_eq!(out.depth_term.to_bits(), dt.to_bits());
        assert_eq!(out.edge_term.to_bits(), et.to_bits());
        assert_eq!(out.total.to_bits(), (dt + cfg.alpha * et).to_bits());
        assert_eq!(out.grad_wrt_depth.len(), 3);
        assert_eq!(out.grad_wrt_depth[2].dims(), (4, 3));
    }

    #[test]
    fn pyramid_mismatch_is_rejected() {
        let (d, e) = scene(8, 8);
        let cfg = LossConfig {
            num_scales: 2,
            ..LossConfig::default()
        };
        let err = total_loss(std::slice::from_ref(&d), std::slice::from_ref(&d), std::slice::from_ref(&e), &cfg, &EdbConfig::default());
        assert!(err.is_err());
        let wrong = DepthMap::from_fn(3, 4, |_, _| 1.0).unwrap();
        let err = total_loss(
            &[d.clone(), wrong.clone()],
            &[d, wrong],
            &[e.clone(), downsample(&e)],
            &cfg,
            &EdbConfig::default(),
        );
        assert!(matches!(err, Err(Error::ShapeMismatch { .. })));
    }

    fn downsample(e: &EdgeMap) -> EdgeMap {
        crate::loss::downsample_edges(e)
    }
}
