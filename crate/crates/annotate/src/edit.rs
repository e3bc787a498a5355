use depthedge::EdgeMap;
use serde::{Deserialize, Serialize};

use crate::error::{AnnotateError, Result};

pub type Pixel = (usize, usize);

/// One annotator stroke. Points are `(row, col)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum EdgeEdit {
    AddPolyline { points: Vec<Pixel> },
    ErasePolyline { points: Vec<Pixel>, brush_radius: f64 },
}

/// Integer line from `a` to `b`, both endpoints included.
pub fn bresenham(a: Pixel, b: Pixel) -> Vec<Pixel> {
    let (mut r, mut c) = (a.0 as i64, a.1 as i64);
    let (r1, c1) = (b.0 as i64, b.1 as i64);
    let dc = (c1 - c).abs();
    let dr = -(r1 - r).abs();
    let sc = if c < c1 { 1 } else { -1 };
    let sr = if r < r1 { 1 } else { -1 };
    let mut err = dc + dr;
    let mut out = Vec::with_capacity((dc.max(-dr) + 1) as usize);
    loop {
        out.push((r as usize, c as usize));
        if r == r1 && c == c1 {
            return out;
        }
        let e2 = 2 * err;
        if e2 >= dr {
            err += dr;
            c += sc;
        }
        if e2 <= dc {
            err += dc;
            r += sr;
        }
    }
}

/// Pixels of a polyline, segment by segment, without repeating joints.
pub fn rasterize(points: &[Pixel]) -> Vec<Pixel> {
    match points {
        [] => Vec::new(),
        [p] => vec![*p],
        _ => {
            let mut out = vec![points[0]];
            for w in points.windows(2) {
                out.extend(bresenham(w[0], w[1]).into_iter().skip(1));
            }
            out
        }
    }
}

impl EdgeEdit {
    pub fn points(&self) -> &[Pixel] {
        match self {
            EdgeEdit::AddPolyline { points } | EdgeEdit::ErasePolyline { points, .. } => points,
        }
    }

    pub fn validate(&self, height: usize, width: usize) -> Result<()> {
        match self {
            EdgeEdit::AddPolyline { points } if points.len() < 2 => {
                return Err(AnnotateError::InvalidEdit("add_polyline needs at least 2 points".into()));
            }
            EdgeEdit::ErasePolyline { points, .. } if points.is_empty() => {
                return Err(AnnotateError::InvalidEdit("erase_polyline needs at least 1 point".into()));
            }
            EdgeEdit::ErasePolyline { brush_radius, .. } if !(brush_radius.is_finite() && *brush_radius >= 0.0) => {
                return Err(AnnotateError::InvalidEdit(format!("brush_radius must be >= 0, got {brush_radius}")));
            }
            _ => {}
        }
        if let Some(p) = self.points().iter().find(|p| p.0 >= height || p.1 >= width) {
            return Err(AnnotateError::InvalidEdit(format!(
                "point {p:?} outside the {height}x{width} frame"
            )));
        }
        Ok(())
    }

    /// Applies the edit to `edges` after validating it against the frame.
    pub fn apply(&self, edges: &mut EdgeMap) -> Result<()> {
        let (h, w) = edges.dims();
        self.validate(h, w)?;
        match self {
            EdgeEdit::AddPolyline { points } => {
                for (r, c) in rasterize(points) {
                    edges.insert(r, c)?;
                }
            }
            EdgeEdit::ErasePolyline { points, brush_radius } => {
                let reach = brush_radius.floor() as usize;
                let r2 = brush_radius * brush_radius;
                for (r, c) in rasterize(points) {
                    for rr in r.saturating_sub(reach)..=(r + reach).min(h - 1) {
                        for cc in c.saturating_sub(reach)..=(c + reach).min(w - 1) {
                            let dr = rr as f64 - r as f64;
                            let dc = cc as f64 - c as f64;
                            if dr * dr + dc * dc <= r2 {
                                edges.remove(rr, cc);
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_aligned_segment() {
        assert_eq!(bresenham((0, 0), (0, 3)), vec![(0, 0), (0, 1), (0, 2), (0, 3)]);
        assert_eq!(bresenham((3, 1), (0, 1)), vec![(3, 1), (2, 1), (1, 1), (0, 1)]);
    }

    #[test]
    fn diagonal_segment() {
        assert_eq!(bresenham((0, 0), (3, 3)), vec![(0, 0), (1, 1), (2, 2), (3, 3)]);
    }

    #[test]
    fn shallow_segment_is_eight_connected() {
        let line = bresenham((0, 0), (2, 7));
        assert_eq!(line.len(), 8);
        for w in line.windows(2) {
            assert!(w[0].0.abs_diff(w[1].0) <= 1 && w[0].1.abs_diff(w[1].1) == 1);
        }
        assert_eq!(*line.last().unwrap(), (2, 7));
    }

    #[test]
    fn polyline_joints_not_repeated() {
        assert_eq!(rasterize(&[(0, 0), (0, 2), (2, 2)]), vec![(0, 0), (0, 1), (0, 2), (1, 2), (2, 2)]);
    }

    #[test]
    fn erase_radius_zero_removes_only_stroke_pixels() {
        let mut e = EdgeMap::from_pixels(4, 4, [(1, 1), (1, 2)]).unwrap();
        EdgeEdit::ErasePolyline { points: vec![(1, 1)], brush_radius: 0.0 }.apply(&mut e).unwrap();
        assert_eq!(e.pixels(), vec![(1, 2)]);
    }

    #[test]
    fn erase_radius_is_euclidean() {
        let mut e = EdgeMap::from_mask(depthedge::Grid::filled(5, 5, true));
        EdgeEdit::ErasePolyline { points: vec![(2, 2)], brush_radius: 1.5 }.apply(&mut e).unwrap();
        // 3x3 block removed, the (0, 2)-style pixels at distance 2 stay
        assert_eq!(e.len(), 25 - 9);
        assert!(e.contains(0, 2));
    }

    #[test]
    fn rejects_bad_edits() {
        let mut e = EdgeMap::empty(4, 4);
        assert!(EdgeEdit::AddPolyline { points: vec![(0, 0)] }.apply(&mut e).is_err());
        assert!(EdgeEdit::AddPolyline { points: vec![(0, 0), (4, 0)] }.apply(&mut e).is_err());
        assert!(EdgeEdit::ErasePolyline { points: vec![(0, 0)], brush_radius: -1.0 }.apply(&mut e).is_err());
        assert!(e.is_empty());
    }

    #[test]
    fn wire_format() {
        let e: EdgeEdit =
            serde_json::from_str(r#"{"op":"erase_polyline","points":[[1,2],[3,4]],"brush_radius":1}"#).unwrap();
        assert_eq!(e, EdgeEdit::ErasePolyline { points: vec![(1, 2), (3, 4)], brush_radius: 1.0 });
    }
}
