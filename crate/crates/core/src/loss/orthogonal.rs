use crate::error::Result;
use crate::extract::depth_gradient;
use crate::grid::Grid;
use crate::model::DepthMap;

use super::orientation::OrientationField;

/// How a pixel's gradient was formed; shared by the forward pass and the
/// analytic backward pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Stencil {
    /// `D[plus] - D[minus]` along the rounded edge normal.
    Orthogonal {
        plus: (usize, usize),
        minus: (usize, usize),
    },
    /// Isotropic central-difference magnitude (no trusted normal).
    Isotropic { row: usize, col: usize },
    Undefined,
}

/// Depth difference across the edge normal, with isotropic fallback.
///
/// At pixels with a defined normal `theta` the value is
/// `D(x + round(cos), y + round(sin)) - D(x - round(cos), y - round(sin))`
/// (rounding half away from zero). Elsewhere it is the central-difference
/// magnitude. Pixels whose samples fall outside the frame or on invalid
/// depth are undefined and carry `0`.
#[derive(Debug, Clone)]
pub struct OrthogonalGradient {
    pub values: Grid<f64>,
    pub defined: Grid<bool>,
    pub(crate) stencil: Grid<Stencil>,
    pub(crate) iso_dx: Grid<f64>,
    pub(crate) iso_dy: Grid<f64>,
}

/// Integer offset `(drow, dcol)` for a normal angle.
pub fn normal_offset(theta: f64) -> (isize, isize) {
    // f64::round rounds half away from zero
    (theta.sin().round() as isize, theta.cos().round() as isize)
}

pub fn orthogonal_gradient(depth: &DepthMap, of: &OrientationField) -> Result<OrthogonalGradient> {
    depth.values().same_shape(&of.theta)?;
    let (h, w) = depth.dims();
    let iso = if h >= 3 && w >= 3 {
        Some(depth_gradient(depth)?)
    } else {
        None
    };
    let mut values = Grid::filled(h, w, 0.0);
    let mut defined = Grid::filled(h, w, false);
    let mut stencil = Grid::filled(h, w, Stencil::Undefined);
    for r in 0..h {
        for c in 0..w {
            let s = match of.get(r, c) {
                Some(theta) => {
                    let (dr, dc) = normal_offset(theta);
                    let (ri, ci) = (r as isize, c as isize);
                    let plus = (ri + dr, ci + dc);
                    let minus = (ri - dr, ci - dc);
                    match (depth.get_signed(plus.0, plus.1), depth.get_signed(minus.0, minus.1)) {
                        (Some(a), Some(b)) => {
                            *values.get_mut(r, c) = a - b;
                            Stencil::Orthogonal {
                                plus: (plus.0 as usize, plus.1 as usize),
                                minus: (minus.0 as usize, minus.1 as usize),
                            }
                        }
                        _ => Stencil::Undefined,
                    }
                }
                None => match &iso {
                    Some(g) if *g.defined.get(r, c) => {
                        *values.get_mut(r, c) = *g.magnitude.get(r, c);
                        Stencil::Isotropic { row: r, col: c }
                    }
                    _ => Stencil::Undefined,
                },
            };
            *defined.get_mut(r, c) = s != Stencil::Undefined;
            *stencil.get_mut(r, c) = s;
        }
    }
    let (iso_dx, iso_dy) = match iso {
        Some(g) => (g.dx, g.dy),
        None => (Grid::filled(h, w, 0.0), Grid::filled(h, w, 0.0)),
    };
    Ok(OrthogonalGradient {
        values,
        defined,
        stencil,
        iso_dx,
        iso_dy,
    })
}

impl OrthogonalGradient {
    /// Scatters `upstream * d|value|/dD` for one pixel into `grad`.
    pub(crate) fn backprop_abs(&self, row: usize, col: usize, upstream: f64, grad: &mut Grid<f64>) {
        match *self.stencil.get(row, col) {
            Stencil::Orthogonal { plus, minus } => {
                let v = *self.values.get(row, col);
                let s = if v > 0.0 {
                    1.0
                } else if v < 0.0 {
                    -1.0
                } else {
                    0.0
                };
                *grad.get_mut(plus.0, plus.1) += upstream * s;
                *grad.get_mut(minus.0, minus.1) -= upstream * s;
            }
            Stencil::Isotropic { row: r, col: c } => {
                let mag = *self.values.get(r, c);
                if mag > 0.0 {
                    let gx = *self.iso_dx.get(r, c) / (2.0 * mag);
                    let gy = *self.iso_dy.get(r, c) / (2.0 * mag);
                    *grad.get_mut(r, c + 1) += upstream * gx;
                    *grad.get_mut(r, c - 1) -= upstream * gx;
                    *grad.get_mut(r + 1, c) += upstream * gy;
                    *grad.get_mut(r - 1, c) -= upstream * gy;
                }
            }
            Stencil::Undefined => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn field() -> DepthMap {
        DepthMap::from_fn(5, 5, |r, c| 1.0 + (r * 7 + c * c) as f64).unwrap()
    }

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(normal_offset(0.0), (0, 1));
        assert_eq!(normal_offset(PI / 2.0), (1, 0));
        assert_eq!(normal_offset(PI / 4.0), (1, 1));
        assert_eq!(normal_offset(-3.0 * PI / 4.0), (-1, -1));
        assert_eq!(normal_offset(PI), (0, -1));
    }

    #[test]
    fn closed_form_differences() {
        let d = field();
        let v = |(r, c): (usize, usize)| d.get(r, c).unwrap();
        for (theta, plus, minus) in [
            (0.0, (2, 3), (2, 1)),
            (PI / 2.0, (3, 2), (1, 2)),
            (PI / 4.0, (3, 3), (1, 1)),
        ] {
            let g = orthogonal_gradient(&d, &OrientationField::uniform(5, 5, theta)).unwrap();
            assert_eq!(*g.values.get(2, 2), v(plus) - v(minus), "theta {theta}");
        }
    }

    #[test]
    fn out_of_frame_samples_are_undefined() {
        let d = field();
        let g = orthogonal_gradient(&d, &OrientationField::uniform(5, 5, 0.0)).unwrap();
        assert!(!*g.defined.get(2, 0));
        assert!(!*g.defined.get(2, 4));
        assert_eq!(*g.values.get(2, 4), 0.0);
    }

    #[test]
    fn undefined_theta_falls_back_to_isotropic() {
        let d = field();
        let g = orthogonal_gradient(&d, &OrientationField::undefined(5, 5)).unwrap();
        let iso = depth_gradient(&d).unwrap();
        assert_eq!(*g.values.get(2, 2), *iso.magnitude.get(2, 2));
        assert!(!*g.defined.get(0, 2));
    }
}
