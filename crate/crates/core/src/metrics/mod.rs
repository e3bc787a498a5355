//! Evaluation protocol: bijective edge matching, precision/recall sweeps,
//! AUC, and per-pixel depth metrics (ARE, delta accuracy, ORD).

mod auc;
mod dataset;
mod depth;
mod matching;
mod pr;

pub use auc::{auc, auc_with_range, AucRange, AucResult};
pub use dataset::{
    aggregate, evaluate_dataset, evaluate_image, image_seed, Conventions, DepthMetrics, EvalConfig,
    ImageMetrics, ItemError, Manifest, ManifestRecord, MetricsReport, DELTA_THRESHOLDS,
};
pub use depth::{are, delta_acc, ord, ordinal_label, sample_pairs, sparse_from, OrdConfig};
pub use matching::{
    candidate_arcs, match_edges, max_bipartite_matching, precision_recall, MatchConfig,
    MatchResult, Pixel,
};
pub use pr::{dedup_sweep, default_sweep, pr_sweep, PrCurve, PrPoint};
