//! JSON-over-HTTP clients. Every provider is a single `POST` endpoint; the
//! request and response bodies are documented on each client type. Images
//! travel as base64 (PNG or JPEG) in `image_base64` fields.

use std::time::Duration;

use async_trait::async_trait;
use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use recomb_core::prompt::ChatRequest;
use recomb_core::{BBox, LayoutSlot, ScoredSegment, ScoredSegmentF64};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bundle::{ProviderConfig, ProviderSlot};
use crate::imaging::decode;
use crate::{
    check_layout_input, normalize, Captioner, ChatModel, ChatReply, Embedder, ImageBytes,
    LayoutImageGenerator, ProviderError, ProviderResult, Segmenter, SketchStylizer,
};

/// One remote endpoint with its timeout and retry policy.
#[derive(Debug, Clone)]
pub struct HttpEndpoint {
    slot: ProviderSlot,
    url: String,
    token_env: Option<String>,
    timeout: Duration,
    max_retries: u32,
    backoff: Duration,
    client: reqwest::Client,
}

impl HttpEndpoint {
    pub fn new(slot: ProviderSlot, cfg: &ProviderConfig) -> ProviderResult<Self> {
        let url = cfg
            .url
            .clone()
            .filter(|u| !u.is_empty())
            .ok_or_else(|| ProviderError::InvalidInput(format!("{slot}: url is required")))?;
        let timeout = Duration::from_millis(cfg.timeout_ms);
        let client = reqwest::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| ProviderError::InvalidInput(format!("{slot}: {e}")))?;
        Ok(Self {
            slot,
            url,
            token_env: cfg.token_env.clone(),
            timeout,
            max_retries: cfg.max_retries,
            backoff: Duration::from_millis(cfg.backoff_ms),
            client,
        })
    }

    fn name(&self) -> String {
        format!("http-{}", self.slot)
    }

    async fn post_once<R: DeserializeOwned>(&self, body: &serde_json::Value) -> ProviderResult<R> {
        let mut req = self.client.post(&self.url).json(body);
        if let Some(token) = self.token_env.as_deref().and_then(|v| std::env::var(v).ok()) {
            req = req.bearer_auth(token);
        }
        let resp = req.send().await.map_err(|e| self.transport_error(e))?;
        let status = resp.status();
        let bytes = resp.bytes().await.map_err(|e| self.transport_error(e))?;
        if !status.is_success() {
            let text = String::from_utf8_lossy(&bytes);
            let message: String = text.chars().take(300).collect();
            return Err(ProviderError::remote(self.name(), status.as_u16(), message));
        }
        if bytes.is_empty() {
            return Err(ProviderError::EmptyResponse(self.name()));
        }
        serde_json::from_slice(&bytes).map_err(|e| {
            ProviderError::remote(self.name(), status.as_u16(), format!("invalid response body: {e}"))
        })
    }

    fn transport_error(&self, e: reqwest::Error) -> ProviderError {
        if e.is_timeout() {
            ProviderError::Timeout {
                provider: self.name(),
                timeout_ms: self.timeout.as_millis() as u64,
            }
        } else {
            let status = e.status().map(|s| s.as_u16()).unwrap_or(0);
            ProviderError::remote(self.name(), status, e.to_string())
        }
    }

    /// Posts `body`, retrying retryable failures with exponential backoff.
    pub async fn post<R: DeserializeOwned>(&self, body: serde_json::Value) -> ProviderResult<R> {
        let mut attempt = 0;
        loop {
            match self.post_once(&body).await {
                Err(e) if e.is_retryable() && attempt < self.max_retries => {
                    let delay = self.backoff * 2u32.saturating_pow(attempt);
                    tracing::warn!(provider = %self.name(), attempt, error = %e, "retrying");
                    tokio::time::sleep(delay).await;
                    attempt += 1;
                }
                other => return other,
            }
        }
    }

    fn id(&self) -> String {
        format!("{}:{}", self.name(), self.url)
    }
}

fn b64(image: &[u8]) -> String {
    B64.encode(image)
}

fn unb64(provider: &str, s: &str) -> ProviderResult<ImageBytes> {
    let bytes = B64
        .decode(s)
        .map_err(|e| ProviderError::remote(provider, 200, format!("bad base64 image: {e}")))?;
    decode(&bytes)?;
    Ok(bytes)
}

#[derive(Deserialize)]
struct ImageReply {
    image_base64: String,
}

/// `{"image_base64"}` → `{"caption"}`.
#[derive(Debug, Clone)]
pub struct HttpCaptioner(pub HttpEndpoint);

#[derive(Deserialize)]
struct CaptionReply {
    caption: String,
}

#[async_trait]
impl Captioner for HttpCaptioner {
    async fn caption(&self, image: &[u8]) -> ProviderResult<String> {
        decode(image)?;
        let reply: CaptionReply = self.0.post(json!({ "image_base64": b64(image) })).await?;
        let caption = reply.caption.split_whitespace().collect::<Vec<_>>().join(" ");
        if caption.is_empty() {
            return Err(ProviderError::EmptyResponse(self.0.name()));
        }
        Ok(caption)
    }

    fn id(&self) -> String {
        self.0.id()
    }
}

/// `{"image_base64"}` → `{"segments": [{"bbox": [x, y, w, h], "score"}]}`
/// with fractional boxes. A segment may give `mask_area` and optionally
/// `stability` instead of `score`.
#[derive(Debug, Clone)]
pub struct HttpSegmenter(pub HttpEndpoint);

#[derive(Deserialize)]
struct SegmentsReply {
    segments: Vec<SegmentItem>,
}

#[derive(Deserialize)]
struct SegmentItem {
    bbox: [f64; 4],
    score: Option<f64>,
    mask_area: Option<f64>,
    stability: Option<f64>,
}

#[async_trait]
impl Segmenter for HttpSegmenter {
    async fn segment(&self, image: &[u8]) -> ProviderResult<Vec<ScoredSegmentF64>> {
        decode(image)?;
        let reply: SegmentsReply = self.0.post(json!({ "image_base64": b64(image) })).await?;
        let bad = |e: recomb_core::CoreError| ProviderError::remote(self.0.name(), 200, e.to_string());
        reply
            .segments
            .into_iter()
            .map(|s| {
                let bbox = BBox::from_array(s.bbox);
                match (s.score, s.mask_area) {
                    (Some(score), _) => ScoredSegment::new(bbox, score).map_err(bad),
                    (None, Some(area)) => ScoredSegment::from_mask(bbox, area, s.stability).map_err(bad),
                    (None, None) => Err(ProviderError::remote(self.0.name(), 200, "segment without score or mask_area")),
                }
            })
            .collect()
    }

    fn id(&self) -> String {
        self.0.id()
    }
}

/// The serialized [`ChatRequest`] → `{"text"}`.
#[derive(Debug, Clone)]
pub struct HttpChat(pub HttpEndpoint);

#[derive(Deserialize)]
struct ChatText {
    text: String,
}

#[async_trait]
impl ChatModel for HttpChat {
    async fn chat(&self, request: &ChatRequest) -> ProviderResult<ChatReply> {
        if !request.is_well_formed() {
            return Err(ProviderError::InvalidInput("malformed chat request".into()));
        }
        let body = serde_json::to_value(request).expect("chat request serializes");
        let reply: ChatText = self.0.post(body).await?;
        if reply.text.trim().is_empty() {
            return Err(ProviderError::EmptyResponse(self.0.name()));
        }
        Ok(ChatReply { text: reply.text, synthetic: false })
    }

    fn id(&self) -> String {
        self.0.id()
    }
}

/// `{"caption", "canvas_px", "layout": [{"name", "bbox"}]}` →
/// `{"image_base64"}`.
#[derive(Debug, Clone)]
pub struct HttpGenerator {
    pub endpoint: HttpEndpoint,
    pub canvas_px: u32,
}

#[derive(Serialize)]
struct LayoutItem<'a> {
    name: &'a str,
    bbox: [f64; 4],
}

#[async_trait]
impl LayoutImageGenerator for HttpGenerator {
    async fn generate_image(&self, caption: &str, layout: &[LayoutSlot]) -> ProviderResult<ImageBytes> {
        check_layout_input(layout)?;
        let items: Vec<LayoutItem> = layout
            .iter()
            .map(|s| LayoutItem { name: &s.object_name, bbox: s.bbox.to_array() })
            .collect();
        let body = json!({ "caption": caption, "canvas_px": self.canvas_px, "layout": items });
        let reply: ImageReply = self.endpoint.post(body).await?;
        unb64(&self.endpoint.name(), &reply.image_base64)
    }

    fn id(&self) -> String {
        self.endpoint.id()
    }
}

/// `{"image_base64"}` → `{"image_base64"}`; the reply must keep the input
/// dimensions.
#[derive(Debug, Clone)]
pub struct HttpStylizer(pub HttpEndpoint);

#[async_trait]
impl SketchStylizer for HttpStylizer {
    async fn stylize_sketch(&self, image: &[u8]) -> ProviderResult<ImageBytes> {
        let dims = crate::imaging::dimensions(image)?;
        let reply: ImageReply = self.0.post(json!({ "image_base64": b64(image) })).await?;
        let out = unb64(&self.0.name(), &reply.image_base64)?;
        if crate::imaging::dimensions(&out)? != dims {
            return Err(ProviderError::remote(self.0.name(), 200, "sketch size differs from input"));
        }
        Ok(out)
    }

    fn id(&self) -> String {
        self.0.id()
    }
}

/// `{"texts"}` → `{"vectors"}`. Vectors are normalized on arrival.
#[derive(Debug, Clone)]
pub struct HttpEmbedder(pub HttpEndpoint);

#[derive(Deserialize)]
struct Vectors {
    vectors: Vec<Vec<f64>>,
}

#[async_trait]
impl Embedder for HttpEmbedder {
    async fn embed(&self, texts: &[String]) -> ProviderResult<Vec<Vec<f64>>> {
        if texts.is_empty() {
            return Err(ProviderError::InvalidInput("nothing to embed".into()));
        }
        let reply: Vectors = self.0.post(json!({ "texts": texts })).await?;
        let bad = |m: &str| ProviderError::remote(self.0.name(), 200, m.to_string());
        if reply.vectors.len() != texts.len() {
            return Err(bad("vector count differs from text count"));
        }
        let dim = reply.vectors[0].len();
        if dim == 0 || reply.vectors.iter().any(|v| v.len() != dim) {
            return Err(bad("vectors have inconsistent dimensions"));
        }
        reply
            .vectors
            .into_iter()
            .map(|v| normalize(v).ok_or_else(|| bad("zero or non-finite vector")))
            .collect()
    }

    fn id(&self) -> String {
        self.0.id()
    }
}
