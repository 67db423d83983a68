//! Interfaces to the six external model capabilities the engine relies on,
//! with deterministic offline stubs and JSON-over-HTTP clients.
//!
//! | capability | trait | stub |
//! |---|---|---|
//! | region captioning | [`Captioner`] | [`stub::StubCaptioner`] |
//! | segmentation | [`Segmenter`] | [`stub::StubSegmenter`] |
//! | chat completion | [`ChatModel`] | [`stub::ReplayChat`] |
//! | layout-conditioned image generation | [`LayoutImageGenerator`] | [`stub::StubGenerator`] |
//! | sketch stylization | [`SketchStylizer`] | [`stub::StubStylizer`] |
//! | text embedding | [`Embedder`] | [`stub::HashEmbedder`] |

pub mod bundle;
mod error;
pub mod fault;
pub mod http;
pub mod imaging;
pub mod stub;

use async_trait::async_trait;
use recomb_core::prompt::ChatRequest;
use recomb_core::{LayoutSlot, ScoredSegmentF64};

pub use bundle::{BundleConfig, ProviderBundle, ProviderConfig, ProviderKind, ProviderSlot};
pub use error::{ProviderError, ProviderResult};
pub use fault::FaultPlan;

/// Encoded image bytes (PNG or JPEG).
pub type ImageBytes = Vec<u8>;

#[async_trait]
pub trait Captioner: Send + Sync {
    /// One-line description of an encoded image region.
    async fn caption(&self, image: &[u8]) -> ProviderResult<String>;
    fn id(&self) -> String;
}

#[async_trait]
pub trait Segmenter: Send + Sync {
    /// Prominent segments with fractional boxes. May be empty.
    async fn segment(&self, image: &[u8]) -> ProviderResult<Vec<ScoredSegmentF64>>;
    fn id(&self) -> String;
}

/// Raw assistant text. `synthetic` marks stub answers that were made up
/// rather than replayed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChatReply {
    pub text: String,
    pub synthetic: bool,
}

#[async_trait]
pub trait ChatModel: Send + Sync {
    async fn chat(&self, request: &ChatRequest) -> ProviderResult<ChatReply>;
    fn id(&self) -> String;
}

#[async_trait]
pub trait LayoutImageGenerator: Send + Sync {
    /// Square image of the configured canvas size with each object inside
    /// its box. The layout may hold any number of boxes, but at least one.
    async fn generate_image(&self, caption: &str, layout: &[LayoutSlot]) -> ProviderResult<ImageBytes>;
    fn id(&self) -> String;
}

#[async_trait]
pub trait SketchStylizer: Send + Sync {
    /// Line-sketch rendition with the same dimensions as the input.
    async fn stylize_sketch(&self, image: &[u8]) -> ProviderResult<ImageBytes>;
    fn id(&self) -> String;
}

#[async_trait]
pub trait Embedder: Send + Sync {
    /// One unit-norm vector per text, all of the same dimension.
    async fn embed(&self, texts: &[String]) -> ProviderResult<Vec<Vec<f64>>>;
    fn id(&self) -> String;
}

pub(crate) fn check_layout_input(layout: &[LayoutSlot]) -> ProviderResult<()> {
    if layout.is_empty() {
        return Err(ProviderError::InvalidInput("layout must hold at least one box".into()));
    }
    if let Some(s) = layout.iter().find(|s| !s.bbox.is_valid()) {
        return Err(ProviderError::InvalidInput(format!(
            "box for {:?} is off the canvas: {:?}",
            s.object_name, s.bbox
        )));
    }
    Ok(())
}

/// Scales a vector to unit length; `None` for the zero vector.
pub fn normalize(mut v: Vec<f64>) -> Option<Vec<f64>> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !norm.is_finite() || norm == 0.0 {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Some(v)
}
