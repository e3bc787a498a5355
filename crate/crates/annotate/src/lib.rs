//! Annotation backend: serves frames, depth and edge proposals, applies
//! journaled add/erase edits, and exports finished edge maps as an
//! evaluation set.

pub mod edit;
pub mod error;
pub mod journal;
pub mod server;
pub mod session;

pub use edit::{bresenham, rasterize, EdgeEdit};
pub use error::{AnnotateError, Result};
pub use server::{router, serve, ServerConfig, DEFAULT_PORT};
pub use session::{
    ExportSummary, ItemSnapshot, ItemEntry, ItemSummary, ProbeResult, Provenance, ProposalSource,
    Session, SessionManifest, Status, WriteGuard,
};
