use crate::error::Result;
use crate::grid::Grid;

const SNAP: f64 = 1e-9;

/// Unit offset `(dy, dx)` along `angle`, oriented towards lexicographically
/// larger `(row, col)`.
fn forward_offset(angle: f64) -> (f64, f64) {
    let snap = |v: f64| if v.abs() < SNAP { 0.0 } else { v };
    let (mut dy, mut dx) = (snap(angle.sin()), snap(angle.cos()));
    if dy < 0.0 || (dy == 0.0 && dx < 0.0) {
        dy = -dy;
        dx = -dx;
    }
    (dy, dx)
}

/// Bilinear sample; corners outside the frame contribute zero.
fn bilinear(field: &Grid<f64>, y: f64, x: f64) -> f64 {
    let (y0, x0) = (y.floor(), x.floor());
    let (fy, fx) = (y - y0, x - x0);
    let (y0, x0) = (y0 as isize, x0 as isize);
    let at = |r: isize, c: isize| field.get_signed(r, c).copied().unwrap_or(0.0);
    let mut acc = 0.0;
    for (r, wy) in [(y0, 1.0 - fy), (y0 + 1, fy)] {
        for (c, wx) in [(x0, 1.0 - fx), (x0 + 1, fx)] {
            let wgt = wy * wx;
            if wgt != 0.0 {
                acc += wgt * at(r, c);
            }
        }
    }
    acc
}

/// Non-maximum suppression along `direction` (radians, `x` = columns,
/// `y` = rows).
///
/// A pixel survives when its value is `>=` the bilinear sample one pixel
/// towards larger `(row, col)` and strictly `>` the sample towards smaller
/// `(row, col)`, so exact plateaus keep their lexicographically smallest
/// pixel. Survivors keep their value; everything else becomes zero.
pub fn nms(magnitude: &Grid<f64>, direction: &Grid<f64>) -> Result<Grid<f64>> {
    magnitude.same_shape(direction)?;
    let (h, w) = magnitude.dims();
    Ok(Grid::from_fn(h, w, |r, c| {
        let m = *magnitude.get(r, c);
        let (dy, dx) = forward_offset(*direction.get(r, c));
        let (y, x) = (r as f64, c as f64);
        let fwd = bilinear(magnitude, y + dy, x + dx);
        let bwd = bilinear(magnitude, y - dy, x - dx);
        if m >= fwd && m > bwd {
            m
        } else {
            0.0
        }
    }))
}
