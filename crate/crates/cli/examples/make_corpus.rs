//! Writes the synthetic evaluation corpus used by the CLI tests:
//! `cargo run -p depthedge-cli --example make_corpus -- <dir>`.

use std::path::PathBuf;

use depthedge::extract::{blur_masked, canny_depth_edges, CannyConfig};
use depthedge::lidar::{simulate_lidar, Intrinsics, LidarConfig};
use depthedge::metrics::ManifestRecord;
use depthedge::{io, json, DepthMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const H: usize = 48;
const W: usize = 64;

/// Ground plane below the horizon, far wall above, and a few boxes.
fn scene(rng: &mut ChaCha8Rng) -> DepthMap {
    let horizon = rng.random_range(12.0..18.0);
    let mut boxes = Vec::new();
    for _ in 0..rng.random_range(2..5) {
        let (r0, c0) = (rng.random_range(5..30), rng.random_range(0..50));
        let (bh, bw) = (rng.random_range(6..18), rng.random_range(5..16));
        boxes.push((r0, (r0 + bh).min(H), c0, (c0 + bw).min(W), rng.random_range(6.0..30.0)));
    }
    DepthMap::from_fn(H, W, |r, c| {
        let below = r as f64 + 0.5 - horizon;
        let mut z: f64 = if below > 0.0 { (120.0 / below).min(70.0) } else { 70.0 };
        for &(r0, r1, c0, c1, bz) in &boxes {
            if (r0..r1).contains(&r) && (c0..c1).contains(&c) {
                z = z.min(bz);
            }
        }
        z
    })
    .unwrap()
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).expect("usage: make_corpus <dir>"));
    let lidar = LidarConfig {
        intrinsics: Intrinsics { fx: 40.0, fy: 40.0, cx: 32.0, cy: 14.0 },
        horiz_step: 0.5,
        ..LidarConfig::default()
    };
    let mut records = Vec::new();
    for k in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + k);
        let truth = scene(&mut rng);
        let id = format!("scene_{k}");
        let edges = canny_depth_edges(&truth, &CannyConfig::default()).unwrap();
        let gt = simulate_lidar(&truth, &lidar).unwrap().to_depth_map().unwrap();
        let scale = rng.random_range(0.9..1.1);
        let blurred = blur_masked(truth.values(), truth.valid(), 0.5 + 0.4 * k as f64);
        let pred = DepthMap::from_fn(H, W, |r, c| {
            scale * blurred.get(r, c) * (1.0 + rng.random_range(-0.03..0.03))
        })
        .unwrap();
        io::save_depth(&dir.join(format!("{id}_pred.pfm")), &pred).unwrap();
        io::save_depth(&dir.join(format!("{id}_gt.png")), &gt).unwrap();
        io::save_edges(&dir.join(format!("{id}_edges.png")), &edges).unwrap();
        records.push(ManifestRecord {
            id: id.clone(),
            pred_depth_path: Some(format!("{id}_pred.pfm").into()),
            gt_depth_path: Some(format!("{id}_gt.png").into()),
            gt_edges_path: format!("{id}_edges.png").into(),
        });
    }
    let manifest = json::to_canonical_json(&records).unwrap();
    io::write_file(&dir.join("manifest.json"), manifest.as_bytes()).unwrap();
}
