use serde::{Deserialize, Serialize};

use super::blur::blur_masked;
use super::gradient::depth_gradient;
use super::hysteresis::hysteresis_masked;
use super::nms::nms;
use crate::error::{Error, Result};
use crate::model::{DepthMap, EdgeMap};

/// Canny thresholds in meters per pixel of depth gradient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CannyConfig {
    pub th_low: f64,
    pub th_high: f64,
    pub smoothing_sigma: f64,
}

impl Default for CannyConfig {
    fn default() -> Self {
        CannyConfig {
            th_low: 4.0,
            th_high: 5.0,
            smoothing_sigma: 0.0,
        }
    }
}

impl CannyConfig {
    pub fn new(th_low: f64, th_high: f64) -> Self {
        CannyConfig {
            th_low,
            th_high,
            smoothing_sigma: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.th_low && self.th_low <= self.th_high) {
            return Err(Error::Config(format!(
                "canny needs 0 <= th_low <= th_high, got {} / {}",
                self.th_low, self.th_high
            )));
        }
        if !(self.smoothing_sigma >= 0.0) {
            return Err(Error::Config(format!(
                "smoothing sigma must be >= 0, got {}",
                self.smoothing_sigma
            )));
        }
        Ok(())
    }
}

/// Canny edges on a depth map: optional masked Gaussian smoothing, central
/// differences, non-maximum suppression and hysteresis. Pixels whose
/// gradient is undefined (border, near invalid depth) are never edges.
pub fn canny_depth_edges(depth: &DepthMap, cfg: &CannyConfig) -> Result<EdgeMap> {
    cfg.validate()?;
    let smoothed;
    let depth = if cfg.smoothing_sigma > 0.0 {
        let values = blur_masked(depth.values(), depth.valid(), cfg.smoothing_sigma);
        smoothed = DepthMap::new(values, depth.valid().clone())?;
        &smoothed
    } else {
        depth
    };
    let grad = depth_gradient(depth)?;
    let thinned = nms(&grad.magnitude, &grad.direction)?;
    hysteresis_masked(&thinned, Some(&grad.defined), cfg.th_low, cfg.th_high)
}
