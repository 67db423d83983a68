//! The engine's pipelines: keyword extraction from a reference image,
//! keyword recommendation, merging keywords into sketched drafts, and
//! further sketches for a draft. Everything model-backed goes through a
//! [`ProviderBundle`](recomb_providers::ProviderBundle).

mod error;
mod orchestrator;
mod reconcile;

pub use error::{PipelineError, PipelineResult};
pub use orchestrator::{
    Extraction, MergeOutcome, Orchestrator, Recommendation, DEFAULT_MORE_SKETCHES,
    MAX_CAPTION_CONCURRENCY,
};
pub use reconcile::reconcile_layout;
