use crate::error::Result;
use crate::grid::Grid;
use crate::model::{DepthMap, EdgeProbMap};

use super::orientation::{EdbConfig, OrientationField};
use super::orthogonal::{orthogonal_gradient, OrthogonalGradient};

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Forward pass of the Edge Detection Block, keeping what the backward pass
/// needs.
#[derive(Debug, Clone)]
pub struct EdbOutput {
    pub probs: EdgeProbMap,
    /// Pixels with a defined gradient; only these enter the edge loss.
    pub domain: Grid<bool>,
    pub(crate) gradient: OrthogonalGradient,
}

/// Edge probability `sigmoid(|grad| - t_grad)` where `grad` is the
/// orthogonal gradient (isotropic where no normal is available).
/// Undefined pixels get `sigmoid(-t_grad)` and are outside `domain`.
pub fn edb_forward(depth: &DepthMap, of: &OrientationField, cfg: &EdbConfig) -> Result<EdbOutput> {
    cfg.validate()?;
    let gradient = orthogonal_gradient(depth, of)?;
    let probs = gradient.values.map(|v| sigmoid(v.abs() - cfg.t_grad));
    Ok(EdbOutput {
        probs: EdgeProbMap::new(probs)?,
        domain: gradient.defined.clone(),
        gradient,
    })
}
