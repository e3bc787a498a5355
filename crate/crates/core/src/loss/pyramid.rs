use crate::error::Result;
use crate::grid::Grid;
use crate::model::{DepthMap, EdgeMap};

/// Dimensions of scale `s`: `ceil(h / 2^s) x ceil(w / 2^s)`.
pub fn scale_dims(height: usize, width: usize, scale: usize) -> (usize, usize) {
    let f = 1usize << scale;
    (height.div_ceil(f), width.div_ceil(f))
}

/// Halves resolution by averaging the valid pixels of each 2x2 block.
/// A block with no valid pixel is invalid.
pub fn downsample_depth(depth: &DepthMap) -> Result<DepthMap> {
    let (h, w) = scale_dims(depth.height(), depth.width(), 1);
    let mut values = Grid::filled(h, w, 0.0);
    let mut valid = Grid::filled(h, w, false);
    for r in 0..h {
        for c in 0..w {
            let mut sum = 0.0;
            let mut n = 0;
            for rr in 2 * r..(2 * r + 2).min(depth.height()) {
                for cc in 2 * c..(2 * c + 2).min(depth.width()) {
                    if let Some(v) = depth.get(rr, cc) {
                        sum += v;
                        n += 1;
                    }
                }
            }
            if n > 0 {
                *values.get_mut(r, c) = sum / n as f64;
                *valid.get_mut(r, c) = true;
            }
        }
    }
    DepthMap::new(values, valid)
}

/// Halves resolution with a logical OR over each 2x2 block.
pub fn downsample_edges(edges: &EdgeMap) -> EdgeMap {
    let (h, w) = scale_dims(edges.height(), edges.width(), 1);
    EdgeMap::from_mask(Grid::from_fn(h, w, |r, c| {
        (2 * r..(2 * r + 2).min(edges.height()))
            .any(|rr| (2 * c..(2 * c + 2).min(edges.width())).any(|cc| edges.contains(rr, cc)))
    }))
}

pub fn depth_pyramid(depth: &DepthMap, num_scales: usize) -> Result<Vec<DepthMap>> {
    let mut out = vec![depth.clone()];
    for s in 1..num_scales {
        out.push(downsample_depth(&out[s - 1])?);
    }
    Ok(out)
}

pub fn edge_pyramid(edges: &EdgeMap, num_scales: usize) -> Vec<EdgeMap> {
    let mut out = vec![edges.clone()];
    for s in 1..num_scales {
        out.push(downsample_edges(&out[s - 1]));
    }
    out
}
