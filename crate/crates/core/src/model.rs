//! Shared data model: dense depth, sparse depth samples, edge sets and
//! edge probability maps.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Dense per-pixel depth in meters with a validity mask.
///
/// Values at invalid pixels are unspecified and must not be read by
/// consumers; the constructors store `0.0` there.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    values: Grid<f64>,
    valid: Grid<bool>,
}

impl DepthMap {
    /// Builds a map from explicit values and mask. Fails if any valid pixel
    /// carries a non-finite or non-positive depth.
    pub fn new(values: Grid<f64>, valid: Grid<bool>) -> Result<Self> {
        values.same_shape(&valid)?;
        check_nonempty(values.height(), values.width())?;
        for (i, (&v, &ok)) in values.as_slice().iter().zip(valid.as_slice()).enumerate() {
            if ok && !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "valid pixel {} has depth {v}",
                    i
                )));
            }
        }
        let mut values = values;
        for (v, &ok) in values.as_mut_slice().iter_mut().zip(valid.as_slice()) {
            if !ok {
                *v = 0.0;
            }
        }
        Ok(DepthMap { values, valid })
    }

    /// Builds a map where every finite positive value is valid and
    /// everything else (zero, negative, NaN, infinity) is invalid.
    pub fn from_dense(height: usize, width: usize, values: Vec<f64>) -> Result<Self> {
        let values = Grid::from_vec(height, width, values)?;
        check_nonempty(height, width)?;
        let valid = values.map(|v| v.is_finite() && *v > 0.0);
        DepthMap::new(values.map(|v| if v.is_finite() && *v > 0.0 { *v } else { 0.0 }), valid)
    }

    pub fn from_fn(height: usize, width: usize, f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let g = Grid::from_fn(height, width, f);
        DepthMap::from_dense(height, width, g.into_vec())
    }

    pub fn height(&self) -> usize {
        self.values.height()
    }

    pub fn width(&self) -> usize {
        self.values.width()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.values.dims()
    }

    #[inline]
    pub fn is_valid(&self, row: usize, col: usize) -> bool {
        *self.valid.get(row, col)
    }

    /// Depth at a pixel, `None` when invalid.
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        if self.is_valid(row, col) {
            Some(*self.values.get(row, col))
        } else {
            None
        }
    }

    #[inline]
    pub fn get_signed(&self, row: isize, col: isize) -> Option<f64> {
        match self.valid.get_signed(row, col) {
            Some(true) => Some(*self.values.get(row as usize, col as usize)),
            _ => None,
        }
    }

    pub fn values(&self) -> &Grid<f64> {
        &self.values
    }

    pub fn valid(&self) -> &Grid<bool> {
        &self.valid
    }

    pub fn valid_count(&self) -> usize {
        self.valid.as_slice().iter().filter(|&&v| v).count()
    }

    /// Returns a copy with one pixel replaced. Used by finite-difference
    /// checks and by tests that perturb predictions.
    pub fn with_value(&self, row: usize, col: usize, depth: f64) -> Result<Self> {
        let mut values = self.values.clone();
        let mut valid = self.valid.clone();
        *values.get_mut(row, col) = depth;
        *valid.get_mut(row, col) = true;
        DepthMap::new(values, valid)
    }
}

/// One depth sample at an integer pixel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub row: usize,
    pub col: usize,
    pub depth: f64,
}

/// A set of depth samples in a fixed image frame, at most one per pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseDepth {
    height: usize,
    width: usize,
    samples: Vec<Sample>,
    occupied: HashSet<(usize, usize)>,
}

impl SparseDepth {
    pub fn new(height: usize, width: usize) -> Self {
        SparseDepth {
            height,
            width,
            samples: Vec::new(),
            occupied: HashSet::new(),
        }
    }

    pub fn from_samples(
        height: usize,
        width: usize,
        samples: impl IntoIterator<Item = Sample>,
    ) -> Result<Self> {
        let mut s = SparseDepth::new(height, width);
        for sample in samples {
            s.push(sample.row, sample.col, sample.depth)?;
        }
        Ok(s)
    }

    /// Every valid pixel of `map` as a sample, in row-major order.
    pub fn from_depth_map(map: &DepthMap) -> Self {
        let (h, w) = map.dims();
        let mut s = SparseDepth::new(h, w);
        for r in 0..h {
            for c in 0..w {
                if let Some(d) = map.get(r, c) {
                    s.samples.push(Sample { row: r, col: c, depth: d });
                    s.occupied.insert((r, c));
                }
            }
        }
        s
    }

    /// Adds a sample. A second sample on an occupied pixel is rejected.
    pub fn push(&mut self, row: usize, col: usize, depth: f64) -> Result<()> {
        if row >= self.height || col >= self.width {
            return Err(Error::InvalidInput(format!(
                "sample ({row}, {col}) outside {}x{} frame",
                self.height, self.width
            )));
        }
        if !(depth.is_finite() && depth > 0.0) {
            return Err(Error::InvalidInput(format!(
                "sample ({row}, {col}) has depth {depth}"
            )));
        }
        if !self.occupied.insert((row, col)) {
            return Err(Error::InvalidInput(format!(
                "duplicate sample at ({row}, {col})"
            )));
        }
        self.samples.push(Sample { row, col, depth });
        Ok(())
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.occupied.contains(&(row, col))
    }

    /// Samples sorted in row-major order.
    pub fn sorted_samples(&self) -> Vec<Sample> {
        let mut v = self.samples.clone();
        v.sort_by_key(|s| (s.row, s.col));
        v
    }

    /// Rasterizes into a depth map that is valid only at sampled pixels.
    pub fn to_depth_map(&self) -> Result<DepthMap> {
        let mut values = Grid::filled(self.height, self.width, 0.0);
        let mut valid = Grid::filled(self.height, self.width, false);
        for s in &self.samples {
            *values.get_mut(s.row, s.col) = s.depth;
            *valid.get_mut(s.row, s.col) = true;
        }
        DepthMap::new(values, valid)
    }
}

/// A binary set of edge pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMap {
    mask: Grid<bool>,
}

impl EdgeMap {
    pub fn empty(height: usize, width: usize) -> Self {
        EdgeMap {
            mask: Grid::filled(height, width, false),
        }
    }

    pub fn from_mask(mask: Grid<bool>) -> Self {
        EdgeMap { mask }
    }

    /// Builds from a pixel list. Duplicates collapse; out-of-bounds pixels
    /// are rejected.
    pub fn from_pixels(
        height: usize,
        width: usize,
        pixels: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut e = EdgeMap::empty(height, width);
        for (r, c) in pixels {
            e.insert(r, c)?;
        }
        Ok(e)
    }

    pub fn insert(&mut self, row: usize, col: usize) -> Result<()> {
        if row >= self.height() || col >= self.width() {
            return Err(Error::InvalidInput(format!(
                "edge pixel ({row}, {col}) outside {}x{} frame",
                self.height(),
                self.width()
            )));
        }
        *self.mask.get_mut(row, col) = true;
        Ok(())
    }

    pub fn remove(&mut self, row: usize, col: usize) {
        if row < self.height() && col < self.width() {
            *self.mask.get_mut(row, col) = false;
        }
    }

    #[inline]
    pub fn contains(&self, row: usize, col: usize) -> bool {
        *self.mask.get(row, col)
    }

    pub fn height(&self) -> usize {
        self.mask.height()
    }

    pub fn width(&self) -> usize {
        self.mask.width()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.mask.dims()
    }

    pub fn mask(&self) -> &Grid<bool> {
        &self.mask
    }

    /// Edge pixels in row-major order.
    pub fn pixels(&self) -> Vec<(usize, usize)> {
        let w = self.width();
        self.mask
            .as_slice()
            .iter()
            .enumerate()
            .filter(|(_, &e)| e)
            .map(|(i, _)| (i / w, i % w))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.mask.as_slice().iter().filter(|&&e| e).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.as_slice().iter().any(|&e| e)
    }
}

/// Per-pixel edge probability in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeProbMap {
    probs: Grid<f64>,
}

impl EdgeProbMap {
    pub fn new(probs: Grid<f64>) -> Result<Self> {
        if let Some(p) = probs.as_slice().iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidInput(format!("probability {p} outside [0, 1]")));
        }
        Ok(EdgeProbMap { probs })
    }

    pub fn from_edges(edges: &EdgeMap) -> Self {
        EdgeProbMap {
            probs: edges.mask().map(|&e| if e { 1.0 } else { 0.0 }),
        }
    }

    pub fn height(&self) -> usize {
        self.probs.height()
    }

    pub fn width(&self) -> usize {
        self.probs.width()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.probs.dims()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        *self.probs.get(row, col)
    }

    pub fn probs(&self) -> &Grid<f64> {
        &self.probs
    }
}

fn check_nonempty(height: usize, width: usize) -> Result<()> {
    if height == 0 || width == 0 {
        return Err(Error::InvalidInput(format!(
            "empty image {height}x{width}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_constructor_marks_nonpositive_invalid() {
        let d = DepthMap::from_dense(1, 4, vec![1.0, 0.0, -2.0, f64::NAN]).unwrap();
        assert_eq!(d.get(0, 0), Some(1.0));
        assert!(!d.is_valid(0, 1));
        assert!(!d.is_valid(0, 2));
        assert!(!d.is_valid(0, 3));
        assert_eq!(d.valid_count(), 1);
    }

    #[test]
    fn explicit_constructor_rejects_bad_valid_depth() {
        let values = Grid::from_vec(1, 2, vec![1.0, -1.0]).unwrap();
        let valid = Grid::filled(1, 2, true);
        assert!(DepthMap::new(values, valid).is_err());
    }

    #[test]
    fn sparse_rejects_duplicates_and_out_of_frame() {
        let mut s = SparseDepth::new(4, 4);
        s.push(1, 1, 3.0).unwrap();
        assert!(s.push(1, 1, 4.0).is_err());
        assert!(s.push(4, 0, 1.0).is_err());
        assert!(s.push(0, 0, 0.0).is_err());
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn edge_map_has_set_semantics() {
        let e = EdgeMap::from_pixels(3, 3, [(0, 0), (0, 0), (2, 1)]).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e.pixels(), vec![(0, 0), (2, 1)]);
        assert!(EdgeMap::from_pixels(3, 3, [(3, 0)]).is_err());
    }

    #[test]
    fn prob_map_rejects_out_of_range() {
        assert!(EdgeProbMap::new(Grid::from_vec(1, 2, vec![0.5, 1.5]).unwrap()).is_err());
    }
}
