//! Edge-aware training loss: the Edge Detection Block, balanced edge
//! cross-entropy, the multi-scale depth term, and analytic gradients with
//! respect to predicted depth.

mod bbce;
mod depth;
mod edb;
mod orientation;
mod orthogonal;
mod pyramid;
mod total;

pub use bbce::{bbce, PROB_EPS};
pub use depth::depth_loss_l1;
pub use edb::{edb_forward, sigmoid, EdbOutput};
pub use orientation::{orientation_from_edges, orientation_from_probs, EdbConfig, OrientationField};
pub use orthogonal::{normal_offset, orthogonal_gradient, OrthogonalGradient};
pub use pyramid::{depth_pyramid, downsample_depth, downsample_edges, edge_pyramid, scale_dims};
pub use total::{
    multiscale_depth_term, multiscale_edge_term, total_loss, DepthLossKind, LossConfig, LossOutput,
};
