//! Per-pixel depth metrics against sparse ground truth.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DepthMap, Sample, SparseDepth};
use crate::region::{Crop, EvalRegion};

/// Cropped (prediction, GT) pairs at every GT sample in the region.
fn paired(pred: &DepthMap, gt: &SparseDepth, region: &EvalRegion) -> Result<Vec<(f64, f64)>> {
    if pred.dims() != gt.dims() {
        return Err(Error::shape(gt.dims(), pred.dims()));
    }
    let pred = pred.crop(region)?;
    let gt = gt.crop(region)?;
    if gt.is_empty() {
        return Err(Error::NoSupervision("no ground-truth samples in region".into()));
    }
    gt.sorted_samples()
        .iter()
        .map(|s| match pred.get(s.row, s.col) {
            Some(p) => Ok((p, s.depth)),
            None => Err(Error::InvalidInput(format!(
                "prediction invalid at GT sample ({}, {}) of the cropped frame",
                s.row, s.col
            ))),
        })
        .collect()
}

/// Mean absolute relative error `|pred - gt| / gt`.
pub fn are(pred: &DepthMap, gt: &SparseDepth, region: &EvalRegion) -> Result<f64> {
    let pairs = paired(pred, gt, region)?;
    let sum: f64 = pairs.iter().map(|&(p, g)| (p - g).abs() / g).sum();
    Ok(sum / pairs.len() as f64)
}

/// Fraction of samples with `max(pred / gt, gt / pred) < threshold`.
pub fn delta_acc(pred: &DepthMap, gt: &SparseDepth, threshold: f64, region: &EvalRegion) -> Result<f64> {
    let pairs = paired(pred, gt, region)?;
    let hits = pairs
        .iter()
        .filter(|&&(p, g)| (p / g).max(g / p) < threshold)
        .count();
    Ok(hits as f64 / pairs.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OrdConfig {
    pub num_pairs: usize,
    pub tau: f64,
}

impl Default for OrdConfig {
    fn default() -> Self {
        OrdConfig {
            num_pairs: 50_000,
            tau: 0.03,
        }
    }
}

/// Ordinal label of a depth pair: `+1` if `a` is farther by more than
/// `1 + tau`, `-1` if `b` is, `0` otherwise.
pub fn ordinal_label(a: f64, b: f64, tau: f64) -> i8 {
    if a / b > 1.0 + tau {
        1
    } else if b / a > 1.0 + tau {
        -1
    } else {
        0
    }
}

/// The `k`-th unordered pair `(i, j)`, `i < j`, of `n` items in
/// lexicographic order.
fn pair_from_index(k: usize, n: usize) -> (usize, usize) {
    // rows before row i hold i * (2n - i - 1) / 2 pairs
    let before = |i: usize| i * (2 * n - i - 1) / 2;
    let nf = n as f64;
    let kf = k as f64;
    let mut i = ((2.0 * nf - 1.0 - ((2.0 * nf - 1.0).powi(2) - 8.0 * kf).max(0.0).sqrt()) / 2.0)
        .floor()
        .max(0.0) as usize;
    while i > 0 && before(i) > k {
        i -= 1;
    }
    while i + 1 < n && before(i + 1) <= k {
        i += 1;
    }
    (i, i + 1 + k - before(i))
}

/// Distinct unordered sample pairs drawn with a seeded generator. When
/// `num_pairs` reaches the number of available pairs every pair is used.
pub fn sample_pairs(n: usize, num_pairs: usize, seed: u64) -> Vec<(usize, usize)> {
    let total = n * n.saturating_sub(1) / 2;
    if num_pairs >= total {
        return (0..total).map(|k| pair_from_index(k, n)).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = rand::seq::index::sample(&mut rng, total, num_pairs).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|k| pair_from_index(k, n)).collect()
}

/// Ordinal disagreement rate over sampled GT pairs.
pub fn ord(
    pred: &DepthMap,
    gt: &SparseDepth,
    cfg: &OrdConfig,
    seed: u64,
    region: &EvalRegion,
) -> Result<f64> {
    if !(cfg.tau > 0.0) {
        return Err(Error::Config(format!("ORD tau must be > 0, got {}", cfg.tau)));
    }
    let pairs = paired(pred, gt, region)?;
    if pairs.len() < 2 {
        return Err(Error::NoSupervision(format!(
            "ORD needs at least 2 GT samples, got {}",
            pairs.len()
        )));
    }
    let chosen = sample_pairs(pairs.len(), cfg.num_pairs, seed);
    if chosen.is_empty() {
        return Err(Error::Config("ORD num_pairs must be >= 1".into()));
    }
    let disagree = chosen
        .iter()
        .filter(|&&(i, j)| {
            let (pi, gi) = pairs[i];
            let (pj, gj) = pairs[j];
            ordinal_label(pi, pj, cfg.tau) != ordinal_label(gi, gj, cfg.tau)
        })
        .count();
    Ok(disagree as f64 / chosen.len() as f64)
}

/// GT samples `(row, col, depth)` from a list, for tests and tools.
pub fn sparse_from(height: usize, width: usize, samples: &[(usize, usize, f64)]) -> Result<SparseDepth> {
    SparseDepth::from_samples(
        height,
        width,
        samples.iter().map(|&(row, col, depth)| Sample { row, col, depth }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pred_row(values: &[f64]) -> DepthMap {
        DepthMap::from_dense(1, values.len(), values.to_vec()).unwrap()
    }

    fn gt_row(values: &[f64]) -> SparseDepth {
        let s: Vec<_> = values.iter().enumerate().map(|(c, &d)| (0, c, d)).collect();
        sparse_from(1, values.len(), &s).unwrap()
    }

    const FULL: EvalRegion = EvalRegion::FULL;

    #[test]
    fn are_examples() {
        assert_eq!(are(&pred_row(&[3.0, 4.0]), &gt_row(&[3.0, 4.0]), &FULL).unwrap(), 0.0);
        assert!((are(&pred_row(&[11.0]), &gt_row(&[10.0]), &FULL).unwrap() - 0.1).abs() < 1e-15);
        assert!((are(&pred_row(&[4.0, 12.0]), &gt_row(&[5.0, 10.0]), &FULL).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn are_errors() {
        let empty = SparseDepth::new(1, 2);
        assert!(are(&pred_row(&[1.0, 2.0]), &empty, &FULL).is_err());
        assert!(are(&pred_row(&[0.0, 2.0]), &gt_row(&[1.0, 2.0]), &FULL).is_err());
    }

    #[test]
    fn delta_examples() {
        let gt = gt_row(&[10.0, 10.0]);
        assert_eq!(delta_acc(&pred_row(&[10.0, 10.0]), &gt, 1.25, &FULL).unwrap(), 1.0);
        assert_eq!(delta_acc(&pred_row(&[13.0, 13.0]), &gt, 1.25, &FULL).unwrap(), 0.0);
        assert_eq!(delta_acc(&pred_row(&[12.0, 13.0]), &gt, 1.25, &FULL).unwrap(), 0.5);
    }

    #[test]
    fn ord_examples() {
        let cfg = OrdConfig::default();
        let gt = gt_row(&[10.0, 10.2, 30.0, 5.0]);
        assert_eq!(ord(&pred_row(&[10.0, 10.2, 30.0, 5.0]), &gt, &cfg, 1, &FULL).unwrap(), 0.0);
        assert_eq!(ord(&pred_row(&[20.0, 20.4, 60.0, 10.0]), &gt, &cfg, 1, &FULL).unwrap(), 0.0);
        assert_eq!(ordinal_label(10.0, 10.2, 0.03), 0);
        assert_eq!(ordinal_label(10.0, 12.0, 0.03), -1);
        let two = gt_row(&[10.0, 10.2]);
        assert_eq!(ord(&pred_row(&[10.0, 12.0]), &two, &cfg, 1, &FULL).unwrap(), 1.0);
    }

    #[test]
    fn ord_needs_two_samples() {
        assert!(ord(&pred_row(&[1.0]), &gt_row(&[1.0]), &OrdConfig::default(), 0, &FULL).is_err());
    }

    #[test]
    fn pair_indexing_enumerates_all_pairs() {
        for n in 2..9 {
            let all: Vec<_> = (0..n * (n - 1) / 2).map(|k| pair_from_index(k, n)).collect();
            let want: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            assert_eq!(all, want);
        }
    }

    #[test]
    fn sampled_pairs_are_distinct_and_seeded() {
        let a = sample_pairs(200, 500, 9);
        let b = sample_pairs(200, 500, 9);
        assert_eq!(a, b);
        let set: std::collections::HashSet<_> = a.iter().collect();
        assert_eq!(set.len(), 500);
        assert!(a.iter().all(|&(i, j)| i < j && j < 200));
        assert_ne!(a, sample_pairs(200, 500, 10));
    }
}
