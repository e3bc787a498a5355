use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::distance::edge_distance_field;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::{EdgeMap, SparseDepth};
use crate::region::EvalRegion;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityBin {
    /// Distance bin: pixels with `floor(distance to nearest edge) == d`.
    pub d: usize,
    /// Pixels in the bin.
    pub count: usize,
    /// Pixels in the bin carrying a LIDAR sample.
    pub lidar_count: usize,
    /// `lidar_count / count`; absent for empty bins.
    pub ratio: Option<f64>,
}

/// LIDAR occupancy as a function of distance to the nearest depth edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub bins: Vec<DensityBin>,
}

impl DensityCurve {
    pub fn ratio(&self, d: usize) -> Option<f64> {
        self.bins.iter().find(|b| b.d == d).and_then(|b| b.ratio)
    }

    /// Same bins with every ratio multiplied by `factor` (clamped to 1).
    pub fn scaled(&self, factor: f64) -> DensityCurve {
        DensityCurve {
            bins: self
                .bins
                .iter()
                .map(|b| DensityBin {
                    ratio: b.ratio.map(|r| (r * factor).min(1.0)),
                    ..*b
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for w in self.bins.windows(2) {
            if w[0].d >= w[1].d {
                return Err(Error::InvalidInput("density bins must be strictly increasing".into()));
            }
        }
        if let Some(b) = self.bins.iter().find(|b| b.ratio.is_some_and(|r| !(0.0..=1.0).contains(&r))) {
            return Err(Error::InvalidInput(format!("density ratio {:?} outside [0, 1]", b.ratio)));
        }
        Ok(())
    }
}

fn bin_of(dist: f64, max_d: usize) -> Option<usize> {
    if dist.is_finite() && dist.floor() <= max_d as f64 {
        Some(dist.floor() as usize)
    } else {
        None
    }
}

fn occupancy(lidar: &SparseDepth) -> Grid<bool> {
    let mut g = Grid::filled(lidar.height(), lidar.width(), false);
    for s in lidar.samples() {
        *g.get_mut(s.row, s.col) = true;
    }
    g
}

/// Ratio of LIDAR-occupied pixels per integer distance-to-edge bin
/// `0..=max_d`, over the pixels inside `region`. Distances are measured to
/// every edge in the full frame.
pub fn density_curve(lidar: &SparseDepth, edges: &EdgeMap, max_d: usize, region: &EvalRegion) -> Result<DensityCurve> {
    if lidar.dims() != edges.dims() {
        return Err(Error::shape(edges.dims(), lidar.dims()));
    }
    let (h, w) = edges.dims();
    let (r0, r1, c0, c1) = region.bounds(h, w)?;
    let dist = edge_distance_field(edges);
    let occ = occupancy(lidar);
    let mut count = vec![0usize; max_d + 1];
    let mut hits = vec![0usize; max_d + 1];
    for r in r0..r1 {
        for c in c0..c1 {
            if let Some(b) = bin_of(*dist.get(r, c), max_d) {
                count[b] += 1;
                if *occ.get(r, c) {
                    hits[b] += 1;
                }
            }
        }
    }
    Ok(DensityCurve {
        bins: (0..=max_d)
            .map(|d| DensityBin {
                d,
                count: count[d],
                lidar_count: hits[d],
                ratio: (count[d] > 0).then(|| hits[d] as f64 / count[d] as f64),
            })
            .collect(),
    })
}

/// Randomly drops samples so that each distance bin approaches the
/// `target` ratio: a sample in bin `d` survives with probability
/// `min(1, target(d) / current(d))`. Bins missing from `target` (or with
/// no ratio) are left untouched.
pub fn thin_to_curve(lidar: &SparseDepth, edges: &EdgeMap, target: &DensityCurve, seed: u64) -> Result<SparseDepth> {
    target.validate()?;
    let max_d = target.bins.iter().map(|b| b.d).max().unwrap_or(0);
    let current = density_curve(lidar, edges, max_d, &EvalRegion::FULL)?;
    let dist = edge_distance_field(edges);
    let keep_prob: Vec<f64> = (0..=max_d)
        .map(|d| match (target.ratio(d), current.ratio(d)) {
            (Some(t), Some(c)) if c > 0.0 => (t / c).min(1.0),
            _ => 1.0,
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SparseDepth::new(lidar.height(), lidar.width());
    for s in lidar.samples() {
        let p = bin_of(*dist.get(s.row, s.col), max_d).map_or(1.0, |b| keep_prob[b]);
        if rng.random_bool(p) {
            out.push(s.row, s.col, s.depth)?;
        }
    }
    Ok(out)
}
