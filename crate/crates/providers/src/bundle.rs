//! The set of six providers a pipeline runs against, and how to build one
//! from a TOML file or the environment.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::http::{
    HttpCaptioner, HttpChat, HttpEmbedder, HttpEndpoint, HttpGenerator, HttpSegmenter,
    HttpStylizer,
};
use crate::stub::{
    HashEmbedder, ReplayChat, StubCaptioner, StubGenerator, StubSegmenter, StubStylizer,
};
use crate::{
    Captioner, ChatModel, Embedder, LayoutImageGenerator, ProviderError, ProviderResult,
    Segmenter, SketchStylizer,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderSlot {
    Captioner,
    Segmenter,
    Chat,
    Generator,
    Stylizer,
    Embedder,
}

impl ProviderSlot {
    pub const ALL: [ProviderSlot; 6] = [
        ProviderSlot::Captioner,
        ProviderSlot::Segmenter,
        ProviderSlot::Chat,
        ProviderSlot::Generator,
        ProviderSlot::Stylizer,
        ProviderSlot::Embedder,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProviderSlot::Captioner => "captioner",
            ProviderSlot::Segmenter => "segmenter",
            ProviderSlot::Chat => "chat",
            ProviderSlot::Generator => "generator",
            ProviderSlot::Stylizer => "stylizer",
            ProviderSlot::Embedder => "embedder",
        }
    }

    /// `RECOMB_<SLOT>_<suffix>`, e.g. `RECOMB_CHAT_URL`.
    pub fn env_var(self, suffix: &str) -> String {
        format!("RECOMB_{}_{suffix}", self.as_str().to_uppercase())
    }
}

impl fmt::Display for ProviderSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    #[default]
    Stub,
    Http,
}

/// Settings of one provider.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProviderConfig {
    pub kind: ProviderKind,
    pub url: Option<String>,
    /// Name of the environment variable holding the bearer token.
    pub token_env: Option<String>,
    pub timeout_ms: u64,
    pub max_retries: u32,
    /// Delay before the first retry; doubles on each further attempt.
    pub backoff_ms: u64,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        Self {
            kind: ProviderKind::Stub,
            url: None,
            token_env: None,
            timeout_ms: 30_000,
            max_retries: 2,
            backoff_ms: 200,
        }
    }
}

/// Settings of the whole bundle, as read from TOML:
///
/// ```toml
/// canvas_px = 512
///
/// [chat]
/// kind = "http"
/// url = "http://localhost:9000/chat"
/// token_env = "RECOMB_CHAT_TOKEN"
/// timeout_ms = 60000
/// ```
///
/// Providers left out are stubs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BundleConfig {
    pub canvas_px: u32,
    /// Seed of the stub embedder's projection.
    pub embed_seed: u64,
    pub captioner: ProviderConfig,
    pub segmenter: ProviderConfig,
    pub chat: ProviderConfig,
    pub generator: ProviderConfig,
    pub stylizer: ProviderConfig,
    pub embedder: ProviderConfig,
}

impl Default for BundleConfig {
    fn default() -> Self {
        Self {
            canvas_px: recomb_core::DEFAULT_CANVAS_PX,
            embed_seed: 0,
            captioner: ProviderConfig::default(),
            segmenter: ProviderConfig::default(),
            chat: ProviderConfig::default(),
            generator: ProviderConfig::default(),
            stylizer: ProviderConfig::default(),
            embedder: ProviderConfig::default(),
        }
    }
}

impl BundleConfig {
    pub fn slot(&self, slot: ProviderSlot) -> &ProviderConfig {
        match slot {
            ProviderSlot::Captioner => &self.captioner,
            ProviderSlot::Segmenter => &self.segmenter,
            ProviderSlot::Chat => &self.chat,
            ProviderSlot::Generator => &self.generator,
            ProviderSlot::Stylizer => &self.stylizer,
            ProviderSlot::Embedder => &self.embedder,
        }
    }

    pub fn slot_mut(&mut self, slot: ProviderSlot) -> &mut ProviderConfig {
        match slot {
            ProviderSlot::Captioner => &mut self.captioner,
            ProviderSlot::Segmenter => &mut self.segmenter,
            ProviderSlot::Chat => &mut self.chat,
            ProviderSlot::Generator => &mut self.generator,
            ProviderSlot::Stylizer => &mut self.stylizer,
            ProviderSlot::Embedder => &mut self.embedder,
        }
    }

    pub fn from_toml(text: &str) -> ProviderResult<Self> {
        let cfg: Self = toml::from_str(text)
            .map_err(|e| ProviderError::InvalidInput(format!("bundle config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Overlays `RECOMB_<SLOT>_URL`, `_TOKEN` and `_TIMEOUT_MS`. A slot with
    /// a URL becomes an HTTP provider whose token is read from `_TOKEN`.
    pub fn with_env(mut self, lookup: impl Fn(&str) -> Option<String>) -> ProviderResult<Self> {
        for slot in ProviderSlot::ALL {
            let cfg = self.slot_mut(slot);
            if let Some(url) = lookup(&slot.env_var("URL")) {
                cfg.kind = ProviderKind::Http;
                cfg.url = Some(url);
            }
            if lookup(&slot.env_var("TOKEN")).is_some() {
                cfg.token_env = Some(slot.env_var("TOKEN"));
            }
            if let Some(ms) = lookup(&slot.env_var("TIMEOUT_MS")) {
                cfg.timeout_ms = ms.trim().parse().map_err(|_| {
                    ProviderError::InvalidInput(format!("{}: not a number: {ms:?}", slot.env_var("TIMEOUT_MS")))
                })?;
            }
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> ProviderResult<()> {
        if self.canvas_px == 0 {
            return Err(ProviderError::InvalidInput("canvas_px must be positive".into()));
        }
        for slot in ProviderSlot::ALL {
            let cfg = self.slot(slot);
            if cfg.timeout_ms == 0 {
                return Err(ProviderError::InvalidInput(format!("{slot}: timeout_ms must be positive")));
            }
            if cfg.kind == ProviderKind::Http && cfg.url.as_deref().is_none_or(str::is_empty) {
                return Err(ProviderError::InvalidInput(format!("{slot}: http provider needs a url")));
            }
        }
        Ok(())
    }
}

/// Handles to all six providers. Cheap to clone and safe to share across
/// tasks.
#[derive(Clone)]
pub struct ProviderBundle {
    pub captioner: Arc<dyn Captioner>,
    pub segmenter: Arc<dyn Segmenter>,
    pub chat: Arc<dyn ChatModel>,
    pub generator: Arc<dyn LayoutImageGenerator>,
    pub stylizer: Arc<dyn SketchStylizer>,
    pub embedder: Arc<dyn Embedder>,
    pub config: BundleConfig,
}

impl fmt::Debug for ProviderBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.ids()).finish()
    }
}

impl Default for ProviderBundle {
    fn default() -> Self {
        Self::stub()
    }
}

impl ProviderBundle {
    /// All stubs: runs offline and deterministically.
    pub fn stub() -> Self {
        Self::from_config(&BundleConfig::default()).expect("default config is valid")
    }

    pub fn from_config(cfg: &BundleConfig) -> ProviderResult<Self> {
        cfg.validate()?;
        let http = |slot: ProviderSlot| -> ProviderResult<Option<HttpEndpoint>> {
            let c = cfg.slot(slot);
            match c.kind {
                ProviderKind::Stub => Ok(None),
                ProviderKind::Http => HttpEndpoint::new(slot, c).map(Some),
            }
        };
        let captioner: Arc<dyn Captioner> = match http(ProviderSlot::Captioner)? {
            Some(e) => Arc::new(HttpCaptioner(e)),
            None => Arc::new(StubCaptioner),
        };
        let segmenter: Arc<dyn Segmenter> = match http(ProviderSlot::Segmenter)? {
            Some(e) => Arc::new(HttpSegmenter(e)),
            None => Arc::new(StubSegmenter::default()),
        };
        let chat: Arc<dyn ChatModel> = match http(ProviderSlot::Chat)? {
            Some(e) => Arc::new(HttpChat(e)),
            None => Arc::new(ReplayChat::default()),
        };
        let generator: Arc<dyn LayoutImageGenerator> = match http(ProviderSlot::Generator)? {
            Some(e) => Arc::new(HttpGenerator { endpoint: e, canvas_px: cfg.canvas_px }),
            None => Arc::new(StubGenerator { canvas_px: cfg.canvas_px }),
        };
        let stylizer: Arc<dyn SketchStylizer> = match http(ProviderSlot::Stylizer)? {
            Some(e) => Arc::new(HttpStylizer(e)),
            None => Arc::new(StubStylizer::default()),
        };
        let embedder: Arc<dyn Embedder> = match http(ProviderSlot::Embedder)? {
            Some(e) => Arc::new(HttpEmbedder(e)),
            None => Arc::new(HashEmbedder::new(cfg.embed_seed)),
        };
        Ok(Self { captioner, segmenter, chat, generator, stylizer, embedder, config: cfg.clone() })
    }

    /// Stubs overlaid with the `RECOMB_<SLOT>_*` environment variables.
    pub fn from_env() -> ProviderResult<Self> {
        let cfg = BundleConfig::default().with_env(|k| std::env::var(k).ok())?;
        Self::from_config(&cfg)
    }

    /// `stub`, `env`, or the path of a TOML bundle config.
    pub fn load(spec: &str) -> ProviderResult<Self> {
        match spec {
            "stub" => Ok(Self::stub()),
            "env" => Self::from_env(),
            path => {
                let text = std::fs::read_to_string(Path::new(path))
                    .map_err(|e| ProviderError::InvalidInput(format!("{path}: {e}")))?;
                Self::from_config(&BundleConfig::from_toml(&text)?)
            }
        }
    }

    /// Identifier of every provider, keyed by slot name.
    pub fn ids(&self) -> Vec<(&'static str, String)> {
        vec![
            ("captioner", self.captioner.id()),
            ("segmenter", self.segmenter.id()),
            ("chat", self.chat.id()),
            ("generator", self.generator.id()),
            ("stylizer", self.stylizer.id()),
            ("embedder", self.embedder.id()),
        ]
    }
}
