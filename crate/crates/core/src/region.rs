//! Evaluation-region cropping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::{DepthMap, EdgeMap, EdgeProbMap, Sample, SparseDepth};

/// A sub-rectangle given as fractions of the image size. Pixel bounds are
/// `round(frac * size)`, half-open at the end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalRegion {
    pub row_start_frac: f64,
    pub row_end_frac: f64,
    pub col_start_frac: f64,
    pub col_end_frac: f64,
}

impl Default for EvalRegion {
    /// Bottom 60% of rows, full width.
    fn default() -> Self {
        EvalRegion {
            row_start_frac: 0.40,
            row_end_frac: 1.0,
            col_start_frac: 0.0,
            col_end_frac: 1.0,
        }
    }
}

impl EvalRegion {
    pub const FULL: EvalRegion = EvalRegion {
        row_start_frac: 0.0,
        row_end_frac: 1.0,
        col_start_frac: 0.0,
        col_end_frac: 1.0,
    };

    /// Bottom 60% of rows with the Garg et al. side margins.
    pub fn bottom_60_garg_sides() -> Self {
        EvalRegion {
            col_start_frac: 0.0359,
            col_end_frac: 0.9641,
            ..EvalRegion::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fracs = [
            self.row_start_frac,
            self.row_end_frac,
            self.col_start_frac,
            self.col_end_frac,
        ];
        if fracs.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(Error::Config(format!("region fractions outside [0, 1]: {self:?}")));
        }
        if self.row_start_frac >= self.row_end_frac || self.col_start_frac >= self.col_end_frac {
            return Err(Error::Config(format!("region start must precede end: {self:?}")));
        }
        Ok(())
    }

    /// Pixel bounds `(r0, r1, c0, c1)` for an image of the given size.
    pub fn bounds(&self, height: usize, width: usize) -> Result<(usize, usize, usize, usize)> {
        self.validate()?;
        let px = |f: f64, n: usize| ((f * n as f64).round() as usize).min(n);
        let (r0, r1) = (px(self.row_start_frac, height), px(self.row_end_frac, height));
        let (c0, c1) = (px(self.col_start_frac, width), px(self.col_end_frac, width));
        if r0 >= r1 || c0 >= c1 {
            return Err(Error::EmptyCrop(format!("{self:?} on {height}x{width}")));
        }
        Ok((r0, r1, c0, c1))
    }

    pub fn contains(&self, bounds: (usize, usize, usize, usize), row: usize, col: usize) -> bool {
        let (r0, r1, c0, c1) = bounds;
        (r0..r1).contains(&row) && (c0..c1).contains(&col)
    }
}

/// Types that can be restricted to an [`EvalRegion`]. Coordinates in the
/// result are relative to the crop origin.
pub trait Crop: Sized {
    fn crop(&self, region: &EvalRegion) -> Result<Self>;
}

impl<T: Clone> Crop for Grid<T> {
    fn crop(&self, region: &EvalRegion) -> Result<Self> {
        let (r0, r1, c0, c1) = region.bounds(self.height(), self.width())?;
        Ok(self.sub(r0, r1, c0, c1))
    }
}

impl Crop for DepthMap {
    fn crop(&self, region: &EvalRegion) -> Result<Self> {
        DepthMap::new(self.values().crop(region)?, self.valid().crop(region)?)
    }
}

impl Crop for EdgeMap {
    fn crop(&self, region: &EvalRegion) -> Result<Self> {
        Ok(EdgeMap::from_mask(self.mask().crop(region)?))
    }
}

impl Crop for EdgeProbMap {
    fn crop(&self, region: &EvalRegion) -> Result<Self> {
        EdgeProbMap::new(self.probs().crop(region)?)
    }
}

impl Crop for SparseDepth {
    fn crop(&self, region: &EvalRegion) -> Result<Self> {
        let b @ (r0, r1, c0, c1) = region.bounds(self.height(), self.width())?;
        let kept = self
            .samples()
            .iter()
            .filter(|s| region.contains(b, s.row, s.col))
            .map(|s| Sample {
                row: s.row - r0,
                col: s.col - c0,
                depth: s.depth,
            });
        SparseDepth::from_samples(r1 - r0, c1 - c0, kept)
    }
}
