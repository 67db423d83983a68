//! Core types and pure logic for the reference recombination engine.
//!
//! * [`model`]: keywords, keyword sets, drafts, boards and the action log.
//! * [`bbox`] and [`layout`]: bounding-box geometry, generic over the scalar
//!   type, plus the layout variator and arrangement selection.
//! * [`prompt`]: chat prompt templates, request builders and response parsers.
//!
//! Geometry is written against [`Scalar`] so it runs on `f32` or `f64`. The
//! rest of the engine stores `f64` boxes; the aliases below name both.

pub mod bbox;
pub mod blob;
pub mod error;
pub mod layout;
pub mod model;
pub mod prompt;
pub mod scalar;

pub use bbox::{BBox, BBoxViolation, PixelRect};
pub use blob::{BlobId, BlobSink, MemoryBlobs};
pub use error::{CoreError, Result};
pub use layout::{Arrangement, RankedLayout, ScoredSegment, VariatorParams};
pub use model::{
    ActionKind, ActionRecord, Board, DraftObject, Keyword, KeywordCategory, KeywordSet,
    KeywordSource, LayoutSlot, Recombination, Reference, Sketch,
};
pub use scalar::Scalar;

/// Single-precision bounding box.
pub type BBoxF32 = bbox::BBox<f32>;
/// Double-precision bounding box, the engine's storage type.
pub type BBoxF64 = bbox::BBox<f64>;
pub type ArrangementF32 = layout::Arrangement<f32>;
pub type ArrangementF64 = layout::Arrangement<f64>;
pub type ScoredSegmentF64 = layout::ScoredSegment<f64>;
pub type RankedLayoutF64 = layout::RankedLayout<f64>;

/// Canvas side length assumed at provider boundaries.
pub const DEFAULT_CANVAS_PX: u32 = 512;
