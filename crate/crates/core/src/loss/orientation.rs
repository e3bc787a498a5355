use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::blur_zero_padded;
use crate::grid::Grid;
use crate::model::{EdgeMap, EdgeProbMap};

/// Edge Detection Block parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EdbConfig {
    /// Sigmoid shift in meters per pixel.
    pub t_grad: f64,
    /// Gaussian blur applied to the edge map before estimating normals.
    pub orientation_sigma: f64,
    /// Minimum blurred-edge gradient magnitude for a trusted normal.
    pub orientation_floor: f64,
}

impl Default for EdbConfig {
    fn default() -> Self {
        EdbConfig {
            t_grad: 4.0,
            orientation_sigma: 2.0,
            orientation_floor: 1e-3,
        }
    }
}

impl EdbConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_grad > 0.0) {
            return Err(Error::Config(format!("t_grad must be > 0, got {}", self.t_grad)));
        }
        if !(self.orientation_sigma >= 0.0 && self.orientation_floor >= 0.0) {
            return Err(Error::Config(format!(
                "orientation sigma/floor must be >= 0, got {} / {}",
                self.orientation_sigma, self.orientation_floor
            )));
        }
        Ok(())
    }
}

/// Per-pixel edge normal angle in `(-pi, pi]`; `x` along columns, `y` along
/// rows.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientationField {
    pub theta: Grid<f64>,
    pub defined: Grid<bool>,
}

impl OrientationField {
    /// A field with the same angle at every pixel.
    pub fn uniform(height: usize, width: usize, theta: f64) -> Self {
        OrientationField {
            theta: Grid::filled(height, width, theta),
            defined: Grid::filled(height, width, true),
        }
    }

    pub fn undefined(height: usize, width: usize) -> Self {
        OrientationField {
            theta: Grid::filled(height, width, 0.0),
            defined: Grid::filled(height, width, false),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.theta.dims()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        if *self.defined.get(row, col) {
            Some(*self.theta.get(row, col))
        } else {
            None
        }
    }
}

/// Edge normals from a ground-truth edge map: blur, take central
/// differences (zero outside the frame) and `atan2(dy, dx)`.
pub fn orientation_from_edges(edges: &EdgeMap, cfg: &EdbConfig) -> OrientationField {
    orientation_from_probs(&EdgeProbMap::from_edges(edges), cfg)
}

pub fn orientation_from_probs(probs: &EdgeProbMap, cfg: &EdbConfig) -> OrientationField {
    let blurred = blur_zero_padded(probs.probs(), cfg.orientation_sigma);
    let (h, w) = blurred.dims();
    let at = |r: isize, c: isize| blurred.get_signed(r, c).copied().unwrap_or(0.0);
    let mut theta = Grid::filled(h, w, 0.0);
    let mut defined = Grid::filled(h, w, false);
    for r in 0..h {
        for c in 0..w {
            let (ri, ci) = (r as isize, c as isize);
            let dx = (at(ri, ci + 1) - at(ri, ci - 1)) / 2.0;
            let dy = (at(ri + 1, ci) - at(ri - 1, ci)) / 2.0;
            let mag = dx.hypot(dy);
            if mag > 0.0 && mag >= cfg.orientation_floor {
                let mut t = dy.atan2(dx);
                if t == -PI {
                    t = PI;
                }
                *theta.get_mut(r, c) = t;
                *defined.get_mut(r, c) = true;
            }
        }
    }
    OrientationField { theta, defined }
}
