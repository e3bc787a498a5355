use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DepthMap, SparseDepth};

/// Pinhole intrinsics in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Intrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

impl Default for Intrinsics {
    /// KITTI raw sequence 2011_09_26, camera 02.
    fn default() -> Self {
        Intrinsics {
            fx: 721.5377,
            fy: 721.5377,
            cx: 609.5593,
            cy: 172.854,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LidarConfig {
    pub num_beams: usize,
    /// Azimuth step between rays, degrees.
    pub horiz_step: f64,
    /// `(min_elev, max_elev)` in degrees, positive up.
    pub vert_fov: (f64, f64),
    pub intrinsics: Intrinsics,
}

impl Default for LidarConfig {
    fn default() -> Self {
        LidarConfig {
            num_beams: 64,
            horiz_step: 0.09,
            vert_fov: (-24.8, 2.0),
            intrinsics: Intrinsics::default(),
        }
    }
}

impl LidarConfig {
    pub fn validate(&self) -> Result<()> {
        let k = &self.intrinsics;
        if !(self.horiz_step > 0.0) {
            return Err(Error::Config(format!("horiz_step must be > 0, got {}", self.horiz_step)));
        }
        if !(self.vert_fov.0 < self.vert_fov.1) {
            return Err(Error::Config(format!("vert_fov needs min < max, got {:?}", self.vert_fov)));
        }
        if !(k.fx > 0.0 && k.fy > 0.0) || !k.cx.is_finite() || !k.cy.is_finite() {
            return Err(Error::Config(format!("bad intrinsics {k:?}")));
        }
        Ok(())
    }

    /// Beam elevations in degrees, top beam first.
    pub fn elevations(&self) -> Vec<f64> {
        let (lo, hi) = self.vert_fov;
        match self.num_beams {
            0 => Vec::new(),
            1 => vec![(lo + hi) / 2.0],
            n => (0..n)
                .map(|k| hi - (hi - lo) * k as f64 / (n - 1) as f64)
                .collect(),
        }
    }

    /// Ray azimuths in degrees across the horizontal field of view of an
    /// image `width` pixels wide: from `atan(-cx / fx)` in steps of
    /// `horiz_step` up to `atan((width - cx) / fx)`.
    pub fn azimuths(&self, width: usize) -> Vec<f64> {
        let k = &self.intrinsics;
        let a_min = (-k.cx / k.fx).atan().to_degrees();
        let a_max = ((width as f64 - k.cx) / k.fx).atan().to_degrees();
        if a_max < a_min {
            return Vec::new();
        }
        let count = ((a_max - a_min) / self.horiz_step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| a_min + i as f64 * self.horiz_step).collect()
    }

    /// Continuous image position `(u, v)` of a ray; `v` grows downwards.
    pub fn project(&self, azimuth_deg: f64, elevation_deg: f64) -> (f64, f64) {
        let k = &self.intrinsics;
        let a = azimuth_deg.to_radians();
        let e = elevation_deg.to_radians();
        (k.fx * a.tan() + k.cx, k.cy - k.fy * e.tan() / a.cos())
    }
}

/// Samples a dense depth map in a rotating-LIDAR pattern.
///
/// Every (beam, azimuth) ray is projected through the pinhole model and
/// snapped to the nearest pixel; rays landing outside the frame or on
/// invalid depth are dropped and repeated pixels are kept once. Samples are
/// emitted beam by beam, left to right.
pub fn simulate_lidar(gt: &DepthMap, cfg: &LidarConfig) -> Result<SparseDepth> {
    cfg.validate()?;
    let (h, w) = gt.dims();
    let mut out = SparseDepth::new(h, w);
    let azimuths = cfg.azimuths(w);
    for e in cfg.elevations() {
        for &a in &azimuths {
            let (u, v) = cfg.project(a, e);
            let (col, row) = (u.round(), v.round());
            if !(col >= 0.0 && row >= 0.0 && col < w as f64 && row < h as f64) {
                continue;
            }
            let (row, col) = (row as usize, col as usize);
            if out.contains(row, col) {
                continue;
            }
            if let Some(d) = gt.get(row, col) {
                out.push(row, col, d)?;
            }
        }
    }
    Ok(out)
}
