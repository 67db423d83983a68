//! Wrappers that inject failures into another provider, for exercising the
//! degraded paths of the pipelines.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use async_trait::async_trait;
use recomb_core::prompt::{ChatRequest, TemplateId};
use recomb_core::{LayoutSlot, ScoredSegmentF64};

use crate::{
    Captioner, ChatModel, ChatReply, ImageBytes, LayoutImageGenerator, ProviderBundle,
    ProviderError, ProviderResult, Segmenter,
};

/// Text returned in place of a real answer when a chat call is corrupted.
pub const MALFORMED_REPLY: &str = "I'm sorry, I can't help with that. ((( [[ ''";

/// Which calls fail. Counters are shared by all clones of a wrapped bundle;
/// with concurrent callers the count of failures is exact but which call
/// fails is not.
#[derive(Debug, Clone, Default)]
pub struct FaultPlan {
    /// The first N caption calls time out.
    pub caption_timeouts: usize,
    /// Every segment call fails with a remote error.
    pub segment_fails: bool,
    /// The first N chat calls of a template get a malformed answer.
    pub chat_malformed: BTreeMap<TemplateId, usize>,
    /// The first N chat calls of a template get an empty-response error.
    pub chat_empty: BTreeMap<TemplateId, usize>,
    /// The first N image generations fail with a remote error.
    pub generator_failures: usize,
}

impl FaultPlan {
    pub fn caption_timeouts(mut self, n: usize) -> Self {
        self.caption_timeouts = n;
        self
    }

    pub fn segment_fails(mut self) -> Self {
        self.segment_fails = true;
        self
    }

    pub fn chat_malformed(mut self, id: TemplateId, n: usize) -> Self {
        self.chat_malformed.insert(id, n);
        self
    }

    pub fn chat_empty(mut self, id: TemplateId, n: usize) -> Self {
        self.chat_empty.insert(id, n);
        self
    }

    pub fn generator_failures(mut self, n: usize) -> Self {
        self.generator_failures = n;
        self
    }

    /// Replaces the affected providers of a bundle with faulty wrappers.
    pub fn wrap(self, mut bundle: ProviderBundle) -> ProviderBundle {
        if self.caption_timeouts > 0 {
            bundle.captioner = Arc::new(FaultyCaptioner {
                inner: bundle.captioner,
                remaining: Budget::new(self.caption_timeouts),
            });
        }
        if self.segment_fails {
            bundle.segmenter = Arc::new(FailingSegmenter { inner: bundle.segmenter });
        }
        if !self.chat_malformed.is_empty() || !self.chat_empty.is_empty() {
            let budgets = |m: &BTreeMap<TemplateId, usize>| {
                m.iter().map(|(k, v)| (*k, Budget::new(*v))).collect()
            };
            bundle.chat = Arc::new(FaultyChat {
                malformed: budgets(&self.chat_malformed),
                empty: budgets(&self.chat_empty),
                inner: bundle.chat,
            });
        }
        if self.generator_failures > 0 {
            bundle.generator = Arc::new(FaultyGenerator {
                inner: bundle.generator,
                remaining: Budget::new(self.generator_failures),
            });
        }
        bundle
    }
}

/// Decrements towards zero; `take` is true while budget remains.
struct Budget(AtomicUsize);

impl Budget {
    fn new(n: usize) -> Self {
        Self(AtomicUsize::new(n))
    }

    fn take(&self) -> bool {
        self.0
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |n| n.checked_sub(1))
            .is_ok()
    }
}

struct FaultyCaptioner {
    inner: Arc<dyn Captioner>,
    remaining: Budget,
}

#[async_trait]
impl Captioner for FaultyCaptioner {
    async fn caption(&self, image: &[u8]) -> ProviderResult<String> {
        if self.remaining.take() {
            return Err(ProviderError::Timeout { provider: self.id(), timeout_ms: 0 });
        }
        self.inner.caption(image).await
    }

    fn id(&self) -> String {
        format!("faulty({})", self.inner.id())
    }
}

struct FailingSegmenter {
    inner: Arc<dyn Segmenter>,
}

#[async_trait]
impl Segmenter for FailingSegmenter {
    async fn segment(&self, _image: &[u8]) -> ProviderResult<Vec<ScoredSegmentF64>> {
        Err(ProviderError::remote(self.id(), 503, "injected failure"))
    }

    fn id(&self) -> String {
        format!("faulty({})", self.inner.id())
    }
}

struct FaultyChat {
    inner: Arc<dyn ChatModel>,
    malformed: BTreeMap<TemplateId, Budget>,
    empty: BTreeMap<TemplateId, Budget>,
}

#[async_trait]
impl ChatModel for FaultyChat {
    async fn chat(&self, request: &ChatRequest) -> ProviderResult<ChatReply> {
        let id = request.template_id;
        if self.empty.get(&id).is_some_and(Budget::take) {
            return Err(ProviderError::EmptyResponse(self.id()));
        }
        if self.malformed.get(&id).is_some_and(Budget::take) {
            return Ok(ChatReply { text: MALFORMED_REPLY.into(), synthetic: true });
        }
        self.inner.chat(request).await
    }

    fn id(&self) -> String {
        format!("faulty({})", self.inner.id())
    }
}

struct FaultyGenerator {
    inner: Arc<dyn LayoutImageGenerator>,
    remaining: Budget,
}

#[async_trait]
impl LayoutImageGenerator for FaultyGenerator {
    async fn generate_image(&self, caption: &str, layout: &[LayoutSlot]) -> ProviderResult<ImageBytes> {
        if self.remaining.take() {
            return Err(ProviderError::remote(self.id(), 500, "injected failure"));
        }
        self.inner.generate_image(caption, layout).await
    }

    fn id(&self) -> String {
        format!("faulty({})", self.inner.id())
    }
}
