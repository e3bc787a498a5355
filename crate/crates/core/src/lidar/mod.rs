//! LIDAR sampling simulation and density analysis around depth edges.

mod density;
mod distance;
mod sim;

pub use density::{density_curve, thin_to_curve, DensityBin, DensityCurve};
pub use distance::edge_distance_field;
pub use sim::{simulate_lidar, Intrinsics, LidarConfig};
