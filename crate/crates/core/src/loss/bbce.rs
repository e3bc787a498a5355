use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::{EdgeMap, EdgeProbMap};

/// Clamp applied to probabilities before taking logarithms.
pub const PROB_EPS: f64 = 1e-7;

/// Balanced binary cross-entropy value and `dL/dp` per pixel.
pub(crate) struct BbceEval {
    pub loss: f64,
    pub dloss_dprob: Grid<f64>,
}

/// Balanced binary cross-entropy.
///
/// `0.5 * mean(-ln p)` over positives plus `0.5 * mean(-ln(1 - p))` over
/// negatives, restricted to `domain`. With only one class present the plain
/// mean over that class is returned.
pub fn bbce(pred: &EdgeProbMap, gt: &EdgeMap, domain: &Grid<bool>) -> Result<f64> {
    Ok(bbce_eval(pred, gt, domain)?.loss)
}

pub(crate) fn bbce_eval(pred: &EdgeProbMap, gt: &EdgeMap, domain: &Grid<bool>) -> Result<BbceEval> {
    pred.probs().same_shape(gt.mask())?;
    pred.probs().same_shape(domain)?;
    let probs = pred.probs().as_slice();
    let labels = gt.mask().as_slice();
    let inside = domain.as_slice();

    let (mut n_pos, mut n_neg) = (0usize, 0usize);
    let (mut sum_pos, mut sum_neg) = (0.0, 0.0);
    for i in 0..probs.len() {
        if !inside[i] {
            continue;
        }
        let p = probs[i].clamp(PROB_EPS, 1.0 - PROB_EPS);
        if labels[i] {
            n_pos += 1;
            sum_pos += -p.ln();
        } else {
            n_neg += 1;
            sum_neg += -(1.0 - p).ln();
        }
    }
    let (w_pos, w_neg) = match (n_pos, n_neg) {
        (0, 0) => {
            return Err(Error::NoSupervision(
                "edge loss domain has neither positives nor negatives".into(),
            ))
        }
        (0, n) => (0.0, 1.0 / n as f64),
        (n, 0) => (1.0 / n as f64, 0.0),
        (p, n) => (0.5 / p as f64, 0.5 / n as f64),
    };
    let loss = match (n_pos, n_neg) {
        (0, _) => sum_neg * w_neg,
        (_, 0) => sum_pos * w_pos,
        _ => sum_pos * w_pos + sum_neg * w_neg,
    };

    let (h, w) = pred.dims();
    let mut dloss_dprob = Grid::filled(h, w, 0.0);
    for (i, g) in dloss_dprob.as_mut_slice().iter_mut().enumerate() {
        let p = probs[i];
        // the clamp has zero derivative once it is active
        if !inside[i] || p <= PROB_EPS || p >= 1.0 - PROB_EPS {
            continue;
        }
        *g = if labels[i] { -w_pos / p } else { w_neg / (1.0 - p) };
    }
    Ok(BbceEval { loss, dloss_dprob })
}
