use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Precision interval used for the partial AUC.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum AucRange {
    /// A fixed `[a, b]` on the precision axis.
    Fixed { a: f64, b: f64 },
    /// The span of precisions actually covered by the curve.
    #[default]
    Covered,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AucResult {
    pub partial: f64,
    pub full: f64,
    /// The `[a, b]` the partial value refers to.
    pub range: [f64; 2],
}

fn sorted(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts = points.to_vec();
    pts.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    pts
}

/// Trapezoidal integral of recall over precision restricted to `[lo, hi]`.
/// Recall is zero outside the span of the points.
fn integrate(pts: &[(f64, f64)], lo: f64, hi: f64) -> f64 {
    let mut sum = 0.0;
    for w in pts.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if x1 <= x0 {
            continue;
        }
        let a = x0.max(lo);
        let b = x1.min(hi);
        if b <= a {
            continue;
        }
        let at = |x: f64| y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        let (ya, yb) = (if a == x0 { y0 } else { at(a) }, if b == x1 { y1 } else { at(b) });
        sum += (b - a) * (ya + yb) / 2.0;
    }
    sum
}

/// Area under a precision (x) / recall (y) curve.
///
/// `partial` is the integral over `[a, b]` divided by `b - a`; `full` is the
/// integral over `[0, 1]`. Neither extrapolates beyond the covered
/// precisions.
pub fn auc(points: &[(f64, f64)], a: f64, b: f64) -> Result<AucResult> {
    if points.is_empty() {
        return Err(Error::InvalidInput("AUC of an empty curve".into()));
    }
    if !(a < b) {
        return Err(Error::Config(format!("AUC range needs a < b, got [{a}, {b}]")));
    }
    let pts = sorted(points);
    Ok(AucResult {
        partial: integrate(&pts, a, b) / (b - a),
        full: integrate(&pts, 0.0, 1.0),
        range: [a, b],
    })
}

/// AUC with a configurable range. For [`AucRange::Covered`] on a curve that
/// collapses to a single precision value, `partial` is the highest recall
/// at that precision (the limit of the mean recall over a shrinking
/// interval).
pub fn auc_with_range(points: &[(f64, f64)], range: AucRange) -> Result<AucResult> {
    match range {
        AucRange::Fixed { a, b } => auc(points, a, b),
        AucRange::Covered => {
            if points.is_empty() {
                return Err(Error::InvalidInput("AUC of an empty curve".into()));
            }
            let pts = sorted(points);
            let (lo, hi) = (pts[0].0, pts[pts.len() - 1].0);
            if lo < hi {
                auc(&pts, lo, hi)
            } else {
                let best = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
                Ok(AucResult {
                    partial: best,
                    full: 0.0,
                    range: [lo, hi],
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle() {
        let r = auc(&[(0.12, 0.4), (0.65, 0.4)], 0.12, 0.65).unwrap();
        assert!((r.partial - 0.4).abs() < 1e-12);
        assert!((r.full - 0.4 * 0.53).abs() < 1e-12);
    }

    #[test]
    fn trapezoid() {
        let r = auc(&[(0.6, 0.4), (0.2, 0.8)], 0.2, 0.6).unwrap();
        assert!((r.partial - 0.6).abs() < 1e-12);
    }

    #[test]
    fn clipping_interpolates_inside_segments() {
        // recall = 1 - precision on [0, 1]; mean over [0.25, 0.75] is 0.5
        let r = auc(&[(0.0, 1.0), (1.0, 0.0)], 0.25, 0.75).unwrap();
        assert!((r.partial - 0.5).abs() < 1e-12);
        assert!((r.full - 0.5).abs() < 1e-12);
    }

    #[test]
    fn range_outside_curve_is_zero() {
        let r = auc(&[(0.1, 0.9), (0.2, 0.9)], 0.5, 0.9).unwrap();
        assert_eq!(r.partial, 0.0);
    }

    #[test]
    fn errors() {
        assert!(auc(&[], 0.0, 1.0).is_err());
        assert!(auc(&[(0.5, 0.5)], 0.6, 0.6).is_err());
    }

    #[test]
    fn covered_range() {
        let r = auc_with_range(&[(0.2, 0.8), (0.6, 0.4)], AucRange::Covered).unwrap();
        assert_eq!(r.range, [0.2, 0.6]);
        assert!((r.partial - 0.6).abs() < 1e-12);
        let single = auc_with_range(&[(1.0, 1.0), (1.0, 1.0)], AucRange::Covered).unwrap();
        assert_eq!(single.partial, 1.0);
        assert_eq!(single.full, 0.0);
    }
}
