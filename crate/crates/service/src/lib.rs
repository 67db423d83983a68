//! REST service around the recombination pipelines. Boards persist as JSON
//! documents under a data directory; images live in a content-addressed
//! blob directory next to them. Requests against one board are serialized.
//!
//! | Method | Path | |
//! |---|---|---|
//! | POST | `/v1/boards` | create a board |
//! | GET | `/v1/boards/{id}` | full board document |
//! | POST | `/v1/boards/{id}/references` | multipart upload, runs extraction |
//! | POST | `/v1/boards/{id}/keywords:select` | select, deselect, add manual keywords |
//! | POST | `/v1/boards/{id}/recommendations` | suggest new keywords |
//! | POST | `/v1/boards/{id}/merges` | three drafts with sketches |
//! | POST | `/v1/boards/{id}/drafts/{draft}/sketches` | further sketches |
//! | POST | `/v1/boards/{id}/drafts/{draft}/complete` | mark a draft complete |
//! | GET | `/v1/boards/{id}/log` | action log as NDJSON |
//! | GET | `/v1/blobs/{sha256}` | stored image bytes |

pub mod api;
pub mod config;
pub mod problem;
pub mod store;

use std::collections::HashMap;
use std::io;
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::DefaultBodyLimit;
use axum::routing::{get, post};
use axum::Router;
use recomb_pipeline::Orchestrator;
use recomb_providers::ProviderBundle;

pub use config::{ServiceConfig, DEFAULT_MAX_UPLOAD_BYTES};
pub use problem::{ApiError, ApiResult};
pub use store::{BoardStore, FileBlobs};

/// Milliseconds since the Unix epoch, injectable for tests.
pub type Clock = Arc<dyn Fn() -> u64 + Send + Sync>;

pub fn system_clock() -> Clock {
    Arc::new(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_millis() as u64)
    })
}

struct Shared {
    store: BoardStore,
    blobs: Arc<FileBlobs>,
    orchestrator: Orchestrator,
    locks: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
    max_upload: usize,
}

#[derive(Clone)]
pub struct AppState {
    shared: Arc<Shared>,
    clock: Clock,
}

impl AppState {
    /// Opens (or creates) the data directory and wires the pipelines to
    /// `providers`.
    pub fn open(config: &ServiceConfig, providers: ProviderBundle) -> io::Result<Self> {
        let store = BoardStore::open(&config.data_dir)?;
        let blobs = Arc::new(FileBlobs::open(config.data_dir.join("blobs"))?);
        let mut orchestrator = Orchestrator::new(providers, blobs.clone());
        if let Some(seed) = config.seed {
            orchestrator = orchestrator.with_seed(seed);
        }
        Ok(Self {
            shared: Arc::new(Shared {
                store,
                blobs,
                orchestrator,
                locks: Mutex::new(HashMap::new()),
                max_upload: config.max_upload_bytes,
            }),
            clock: system_clock(),
        })
    }

    pub fn with_clock(mut self, clock: Clock) -> Self {
        self.clock = clock;
        self
    }

    pub fn store(&self) -> &BoardStore {
        &self.shared.store
    }

    pub fn blobs(&self) -> &FileBlobs {
        &self.shared.blobs
    }

    pub fn orchestrator(&self) -> &Orchestrator {
        &self.shared.orchestrator
    }

    pub fn max_upload(&self) -> usize {
        self.shared.max_upload
    }

    pub fn now_ms(&self) -> u64 {
        (self.clock)()
    }

    /// Holds the board's write lock until the guard drops.
    pub async fn lock(&self, board_id: &str) -> tokio::sync::OwnedMutexGuard<()> {
        let m = {
            let mut locks = self.shared.locks.lock().expect("lock map poisoned");
            locks.entry(board_id.to_string()).or_default().clone()
        };
        m.lock_owned().await
    }
}

pub fn router(state: AppState) -> Router {
    // Leave room for multipart framing and the position field; the image
    // itself is checked against the exact limit in the handler.
    let body_limit = state.max_upload() + 64 * 1024;
    Router::new()
        .route("/v1/boards", post(api::create_board))
        .route("/v1/boards/{id}", get(api::get_board))
        .route("/v1/boards/{id}/references", post(api::add_reference))
        .route("/v1/boards/{id}/keywords:select", post(api::select_keywords))
        .route("/v1/boards/{id}/recommendations", post(api::recommend))
        .route("/v1/boards/{id}/merges", post(api::merge))
        .route("/v1/boards/{id}/drafts/{draft}/sketches", post(api::more_sketches))
        .route("/v1/boards/{id}/drafts/{draft}/complete", post(api::complete))
        .route("/v1/boards/{id}/log", get(api::action_log))
        .route("/v1/blobs/{sha}", get(api::blob))
        .fallback(api::fallback)
        .layer(DefaultBodyLimit::max(body_limit))
        .with_state(state)
}

/// Binds `config.bind` and serves until Ctrl-C.
pub async fn serve(config: ServiceConfig) -> io::Result<()> {
    let providers = ProviderBundle::load(&config.providers)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e.to_string()))?;
    let state = AppState::open(&config, providers)?;
    let listener = tokio::net::TcpListener::bind(&config.bind).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
