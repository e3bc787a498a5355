use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::DepthMap;

/// Central-difference depth gradient in meters per pixel.
///
/// `x` runs along columns and `y` along rows (downwards). A pixel is defined
/// only if it is not on the frame border and its whole 3x3 neighbourhood is
/// valid; undefined pixels carry zero magnitude and direction.
#[derive(Debug, Clone)]
pub struct DepthGradient {
    pub dx: Grid<f64>,
    pub dy: Grid<f64>,
    pub magnitude: Grid<f64>,
    pub direction: Grid<f64>,
    pub defined: Grid<bool>,
}

pub fn depth_gradient(depth: &DepthMap) -> Result<DepthGradient> {
    let (h, w) = depth.dims();
    if h < 3 || w < 3 {
        return Err(Error::InvalidInput(format!(
            "gradient needs at least 3x3 pixels, got {h}x{w}"
        )));
    }
    let defined = Grid::from_fn(h, w, |r, c| {
        if r == 0 || c == 0 || r + 1 == h || c + 1 == w {
            return false;
        }
        (r - 1..=r + 1).all(|rr| (c - 1..=c + 1).all(|cc| depth.is_valid(rr, cc)))
    });
    let v = depth.values();
    let dx = Grid::from_fn(h, w, |r, c| {
        if *defined.get(r, c) {
            (v.get(r, c + 1) - v.get(r, c - 1)) / 2.0
        } else {
            0.0
        }
    });
    let dy = Grid::from_fn(h, w, |r, c| {
        if *defined.get(r, c) {
            (v.get(r + 1, c) - v.get(r - 1, c)) / 2.0
        } else {
            0.0
        }
    });
    let magnitude = Grid::from_fn(h, w, |r, c| dx.get(r, c).hypot(*dy.get(r, c)));
    let direction = Grid::from_fn(h, w, |r, c| dy.get(r, c).atan2(*dx.get(r, c)));
    Ok(DepthGradient {
        dx,
        dy,
        magnitude,
        direction,
        defined,
    })
}
