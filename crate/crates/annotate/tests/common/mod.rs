#![allow(dead_code)]

use std::path::Path;

use depthedge::io;
use depthedge::{DepthMap, EdgeMap, Grid};
use serde_json::json;

pub const H: usize = 8;
pub const W: usize = 10;

/// Panoptic labels: left half segment 1 (class 7), right half segment 2
/// (class 7), bottom two rows segment 3 (class 9).
pub fn panoptic_grids() -> (Grid<u16>, Grid<u16>) {
    let seg = Grid::from_fn(H, W, |r, c| if r >= H - 2 { 3 } else if c < W / 2 { 1 } else { 2 });
    let class = seg.map(|&s| if s == 3 { 9 } else { 7 });
    (seg, class)
}

/// Depth with a 5 m step between columns 4 and 5 on a 10 m background.
pub fn step_depth() -> DepthMap {
    DepthMap::from_fn(H, W, |_, c| if c < W / 2 { 10.0 } else { 15.0 }).unwrap()
}

pub fn proposal_edges() -> EdgeMap {
    EdgeMap::from_pixels(H, W, (0..H).map(|r| (r, 2))).unwrap()
}

/// Writes a two-item dataset: `a` has panoptic labels and depth, `b` has
/// an edge-map proposal and no depth.
pub fn write_dataset(root: &Path) {
    let (seg, class) = panoptic_grids();
    io::write_file(&root.join("a_pan.png"), &io::write_u16_channels(&[seg, class]).unwrap()).unwrap();
    io::save_depth(&root.join("a_depth.png"), &step_depth()).unwrap();
    io::save_edges(&root.join("b_edges.png"), &proposal_edges()).unwrap();
    let rgb = io::write_edges_png8(&EdgeMap::empty(H, W)).unwrap();
    io::write_file(&root.join("a.png"), &rgb).unwrap();
    io::write_file(&root.join("b.png"), &rgb).unwrap();
    let manifest = json!({
        "items": [
            {"id": "a", "rgb_path": "a.png", "depth_path": "a_depth.png", "panoptic_path": "a_pan.png"},
            {"id": "b", "rgb_path": "b.png", "edges_path": "b_edges.png"}
        ],
        "excluded_class_pairs": []
    });
    std::fs::write(root.join("manifest.json"), manifest.to_string()).unwrap();
}
