//! File formats.
//!
//! * depth: KITTI-style 16-bit grayscale PNG (`raw / 256` meters, `0` invalid)
//!   and grayscale PFM for dense float depth;
//! * edges: 8-bit grayscale PNG, `255` edge, `0` background;
//! * edge probabilities: 16-bit grayscale PNG, `raw / 65535`;
//! * panoptic labels: 16-bit gray+alpha PNG, channel 0 segment id,
//!   channel 1 class id.

mod pfm;
mod png;

use std::path::Path;

pub use self::pfm::{read_pfm, read_pfm_grid, write_pfm_depth, write_pfm_grid};
pub use self::png::{
    read_depth_png16, read_edges_png8, read_prob_png16, read_u16_channels, write_depth_png16,
    write_edges_png8, write_prob_png16, write_u16_channels,
};

use crate::error::{Error, Result};
use crate::extract::PanopticMap;
use crate::model::{DepthMap, EdgeMap, EdgeProbMap};

pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Loads a depth map, choosing the decoder from the file extension
/// (`.pfm` or `.png`).
pub fn load_depth(path: &Path) -> Result<DepthMap> {
    let bytes = read_file(path)?;
    match extension(path).as_deref() {
        Some("pfm") => read_pfm(&bytes),
        Some("png") => read_depth_png16(&bytes),
        other => Err(Error::Format(format!(
            "{}: unsupported depth extension {:?}",
            path.display(),
            other
        ))),
    }
    .map_err(|e| with_path(path, e))
}

pub fn save_depth(path: &Path, depth: &DepthMap) -> Result<()> {
    let bytes = match extension(path).as_deref() {
        Some("pfm") => write_pfm_depth(depth),
        Some("png") => write_depth_png16(depth)?,
        other => {
            return Err(Error::Format(format!(
                "{}: unsupported depth extension {:?}",
                path.display(),
                other
            )))
        }
    };
    write_file(path, &bytes)
}

fn extension(path: &Path) -> Option<String> {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
}

pub fn load_edges(path: &Path) -> Result<EdgeMap> {
    read_edges_png8(&read_file(path)?).map_err(|e| with_path(path, e))
}

pub fn save_edges(path: &Path, edges: &EdgeMap) -> Result<()> {
    write_file(path, &write_edges_png8(edges)?)
}

pub fn load_probs(path: &Path) -> Result<EdgeProbMap> {
    read_prob_png16(&read_file(path)?).map_err(|e| with_path(path, e))
}

/// Unordered class-id pairs from a JSON list such as `[[7, 8], [11, 12]]`.
pub fn load_class_pairs(path: &Path) -> Result<Vec<(u32, u32)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Panoptic labels from a two-channel 16-bit PNG.
pub fn load_panoptic(path: &Path, excluded: &[(u32, u32)]) -> Result<PanopticMap> {
    let channels = read_u16_channels(&read_file(path)?, 2).map_err(|e| with_path(path, e))?;
    let widen = |g: &crate::Grid<u16>| g.map(|&v| u32::from(v));
    PanopticMap::new(widen(&channels[0]), widen(&channels[1]), excluded.iter().copied())
}

fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        e => e,
    }
}
