//! Depth-edge toolkit: extract, post-process and evaluate depth edges in
//! predicted depth maps, compute the edge-aware training loss with analytic
//! gradients, and analyse LIDAR sampling density near depth edges.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod extract;
pub mod grid;
pub mod io;
pub mod json;
pub mod lidar;
pub mod loss;
pub mod metrics;
pub mod model;
pub mod par;
pub mod region;

pub use error::{Error, Result};
pub use grid::Grid;
pub use model::{DepthMap, EdgeMap, EdgeProbMap, Sample, SparseDepth};
pub use region::{Crop, EvalRegion};
