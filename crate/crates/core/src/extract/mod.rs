//! Deterministic edge pipelines on depth and edge-probability maps.

mod blur;
mod canny;
mod dee;
mod gradient;
mod hysteresis;
mod nms;
mod panoptic;

pub use blur::{blur_masked, blur_zero_padded, gaussian_kernel};
pub use canny::{canny_depth_edges, CannyConfig};
pub use dee::dee_postprocess;
pub use gradient::{depth_gradient, DepthGradient};
pub use hysteresis::{hysteresis, HysteresisConfig};
pub use nms::nms;
pub use panoptic::{gt_from_panoptic, PanopticMap};
