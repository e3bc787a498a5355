#![allow(dead_code)]

use depthedge::{DepthMap, EdgeMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random 16x16 loss instance: dense prediction in [1, 80] m, sparse GT
/// depth, and a GT edge map made of one random segment plus scattered
/// pixels (so some pixels have edge normals and some fall back to the
/// isotropic gradient).
pub struct LossInstance {
    pub pred: DepthMap,
    pub gt_depth: DepthMap,
    pub gt_edges: EdgeMap,
}

pub fn loss_instance(seed: u64, size: usize) -> LossInstance {
    let mut r = rng(seed);
    let pred = DepthMap::from_fn(size, size, |_, _| r.random_range(1.0..80.0)).unwrap();
    let gt_depth = DepthMap::from_fn(size, size, |_, _| {
        if r.random_bool(0.3) {
            r.random_range(1.0..80.0)
        } else {
            0.0
        }
    })
    .unwrap();
    let mut gt_edges = EdgeMap::empty(size, size);
    let (r0, c0) = (r.random_range(0..size), r.random_range(0..size));
    let (r1, c1) = (r.random_range(0..size), r.random_range(0..size));
    let steps = r0.abs_diff(r1).max(c0.abs_diff(c1)).max(1);
    for k in 0..=steps {
        let t = k as f64 / steps as f64;
        let rr = (r0 as f64 + t * (r1 as f64 - r0 as f64)).round() as usize;
        let cc = (c0 as f64 + t * (c1 as f64 - c0 as f64)).round() as usize;
        gt_edges.insert(rr, cc).unwrap();
    }
    for rr in 0..size {
        for cc in 0..size {
            if r.random_bool(0.02) {
                gt_edges.insert(rr, cc).unwrap();
            }
        }
    }
    LossInstance {
        pred,
        gt_depth,
        gt_edges,
    }
}

/// Random edge pixel set with at most `max` pixels inside an `h x w` frame.
pub fn random_edges(r: &mut ChaCha8Rng, h: usize, w: usize, max: usize) -> EdgeMap {
    let n = r.random_range(0..=max);
    let mut e = EdgeMap::empty(h, w);
    for _ in 0..n {
        e.insert(r.random_range(0..h), r.random_range(0..w)).unwrap();
    }
    e
}
