//! Batch evaluation over an annotated image manifest:
//!
//! * **keywords**: precision and recall of extracted subject matter and
//!   action & pose keywords under greedy embedding matching, and
//!   mean-embedding similarity for theme & mood;
//! * **recommend**: similarity of recommendations to the sampled keywords,
//!   bracketed by an irrelevant and a synonym group;
//! * **diversity**: one minus the mean pairwise similarity of generated
//!   descriptions, bracketed by random descriptions and paraphrases.
//!
//! Reports are deterministic for a fixed manifest, bundle and seed.

pub mod error;
pub mod harness;
pub mod manifest;
pub mod metrics;
pub mod report;
pub mod sample;

pub use error::{EvalError, EvalResult};
pub use harness::{band_set, score_image, summarize_keywords, EvalParams, Evaluator};
pub use manifest::{AnnotatedImage, Manifest, ManifestEntry};
pub use metrics::{
    cosine, diversity, greedy_matches, match_pr, match_pr_vectors, mean_embedding_similarity,
    mean_pairwise_similarity, mean_vector, DiversityScore, PrecisionRecall, DEFAULT_MATCH_THRESHOLD,
};
pub use report::{EvalKind, EvalReport};
