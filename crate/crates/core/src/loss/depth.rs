use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::DepthMap;

pub(crate) struct L1Eval {
    pub loss: f64,
    pub grad: Grid<f64>,
}

/// Mean absolute depth error in meters over the valid pixels of `gt`.
pub fn depth_loss_l1(pred: &DepthMap, gt: &DepthMap) -> Result<f64> {
    Ok(l1_eval(pred, gt)?.loss)
}

pub(crate) fn l1_eval(pred: &DepthMap, gt: &DepthMap) -> Result<L1Eval> {
    pred.values().same_shape(gt.values())?;
    let (h, w) = pred.dims();
    let mut sum = 0.0;
    let mut n = 0usize;
    for r in 0..h {
        for c in 0..w {
            if let Some(g) = gt.get(r, c) {
                let p = pred.get(r, c).ok_or_else(|| {
                    Error::InvalidInput(format!("prediction invalid at GT pixel ({r}, {c})"))
                })?;
                sum += (p - g).abs();
                n += 1;
            }
        }
    }
    if n == 0 {
        return Err(Error::NoSupervision("ground-truth depth has no valid pixels".into()));
    }
    let inv = 1.0 / n as f64;
    let grad = Grid::from_fn(h, w, |r, c| match (pred.get(r, c), gt.get(r, c)) {
        (Some(p), Some(g)) if p > g => inv,
        (Some(p), Some(g)) if p < g => -inv,
        _ => 0.0,
    });
    Ok(L1Eval {
        loss: sum / n as f64,
        grad,
    })
}
