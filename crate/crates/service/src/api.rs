//! Route handlers. Every successful mutation appends exactly one action
//! record and persists the board before the response is sent.

use axum::body::Bytes;
use axum::extract::multipart::MultipartError;
use axum::extract::{Multipart, Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use recomb_core::{
    ActionKind, BlobId, BlobSink, Board, Keyword, KeywordCategory, KeywordSet, KeywordSource,
    Reference,
};
use recomb_pipeline::DEFAULT_MORE_SKETCHES;
use recomb_providers::imaging;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::problem::{ApiError, ApiResult};
use crate::AppState;

/// Upper bound for one "more sketches" request.
pub const MAX_SKETCHES_PER_REQUEST: usize = 20;

fn parse_body<T: DeserializeOwned + Default>(body: &Bytes) -> ApiResult<T> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("invalid JSON body: {e}")))
}

fn load(state: &AppState, id: &str) -> ApiResult<Board> {
    state
        .store()
        .load(id)
        .map_err(ApiError::storage)?
        .ok_or_else(|| ApiError::not_found("board", id))
}

fn commit(state: &AppState, board: &mut Board, kind: ActionKind, payload: &Value) -> ApiResult<()> {
    board.log(kind, payload, state.now_ms());
    state.store().save(board).map_err(ApiError::storage)
}

fn keywords_by_id(board: &Board, ids: &[String]) -> ApiResult<Vec<Keyword>> {
    ids.iter()
        .map(|id| board.keyword(id).cloned().ok_or_else(|| ApiError::not_found("keyword", id)))
        .collect()
}

pub async fn create_board(State(state): State<AppState>) -> ApiResult<(StatusCode, Json<Board>)> {
    let board = state.store().create(state.now_ms()).map_err(ApiError::storage)?;
    Ok((StatusCode::CREATED, Json(board)))
}

pub async fn get_board(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Board>> {
    Ok(Json(load(&state, &id)?))
}

fn multipart_error(e: MultipartError) -> ApiError {
    let status = e.status();
    if status == StatusCode::PAYLOAD_TOO_LARGE {
        ApiError::new(status, "too-large", e.body_text())
    } else {
        ApiError::new(status, "bad-multipart", e.body_text())
    }
}

#[derive(Debug, Serialize)]
pub struct ReferenceAdded {
    pub reference: Reference,
    pub keywords: Vec<Keyword>,
    pub degraded: bool,
    pub issues: Vec<String>,
}

pub async fn add_reference(
    State(state): State<AppState>,
    Path(id): Path<String>,
    mut form: Multipart,
) -> ApiResult<(StatusCode, Json<ReferenceAdded>)> {
    let _guard = state.lock(&id).await;
    let mut board = load(&state, &id)?;

    let mut image: Option<Bytes> = None;
    let mut position: Option<Value> = None;
    while let Some(field) = form.next_field().await.map_err(multipart_error)? {
        match field.name() {
            Some("image") => image = Some(field.bytes().await.map_err(multipart_error)?),
            Some("position") => {
                let text = field.text().await.map_err(multipart_error)?;
                let value = serde_json::from_str(&text)
                    .map_err(|e| ApiError::bad_request(format!("position is not JSON: {e}")))?;
                position = Some(value);
            }
            _ => {}
        }
    }
    let image = image.ok_or_else(|| ApiError::bad_request("missing multipart field \"image\""))?;
    if image.len() > state.max_upload() {
        return Err(ApiError::new(
            StatusCode::PAYLOAD_TOO_LARGE,
            "too-large",
            format!("image is {} bytes, limit is {}", image.len(), state.max_upload()),
        ));
    }
    if let Err(e) = imaging::dimensions(&image) {
        return Err(ApiError::new(StatusCode::UNSUPPORTED_MEDIA_TYPE, "unsupported-image", e.to_string()));
    }

    let ref_id = board.fresh_id("ref");
    let extraction = state.orchestrator().extract_keywords(&image, &ref_id).await?;
    let blob = state.blobs().put(&image).map_err(ApiError::storage)?;
    board.references.push(Reference {
        id: ref_id.clone(),
        image: blob.clone(),
        keywords: extraction.keywords.clone(),
        arrangement: extraction.arrangement.clone(),
        captions: extraction.captions.clone(),
        degraded: extraction.degraded,
        position,
    });

    let mut ids = Vec::new();
    for (category, text) in extraction.keywords.iter() {
        let kw = Keyword::textual("", category, text, KeywordSource::Extracted)
            .map_err(recomb_pipeline::PipelineError::from)?
            .with_source_image(&ref_id);
        ids.push(board.add_keyword(kw).map_err(recomb_pipeline::PipelineError::from)?.0);
    }
    if let Some(arr) = &extraction.arrangement {
        let kw = Keyword::arrangement("", &ref_id, &arr.id, KeywordSource::Extracted);
        ids.push(board.add_keyword(kw).map_err(recomb_pipeline::PipelineError::from)?.0);
    }
    ids.dedup();

    let payload = json!({ "reference_id": ref_id, "image": blob, "keyword_ids": ids });
    commit(&state, &mut board, ActionKind::AddReference, &payload)?;
    let reference = board.reference(&ref_id).cloned().expect("just added");
    Ok((
        StatusCode::CREATED,
        Json(ReferenceAdded {
            reference,
            keywords: keywords_by_id(&board, &ids)?,
            degraded: extraction.degraded,
            issues: extraction.issues,
        }),
    ))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManualKeyword {
    pub category: KeywordCategory,
    #[serde(default)]
    pub text: Option<String>,
    #[serde(default)]
    pub arrangement_id: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectRequest {
    pub select: Vec<String>,
    pub deselect: Vec<String>,
    pub manual: Vec<ManualKeyword>,
}

#[derive(Debug, Serialize)]
pub struct SelectionChanged {
    pub added: Vec<String>,
    pub selected: Vec<Keyword>,
}

pub async fn select_keywords(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<SelectionChanged>> {
    let req: SelectRequest = parse_body(&body)?;
    if req.select.is_empty() && req.deselect.is_empty() && req.manual.is_empty() {
        return Err(ApiError::bad_request("nothing to select, deselect or add"));
    }
    let _guard = state.lock(&id).await;
    let mut board = load(&state, &id)?;
    keywords_by_id(&board, &req.select)?;
    keywords_by_id(&board, &req.deselect)?;

    let mut added = Vec::new();
    for m in &req.manual {
        let kw = if m.category == KeywordCategory::Arrangement {
            let arr_id = m
                .arrangement_id
                .as_deref()
                .ok_or_else(|| ApiError::bad_request("arrangement keywords need an arrangement_id"))?;
            let arr = board.arrangement(arr_id).ok_or_else(|| ApiError::not_found("arrangement", arr_id))?;
            Keyword::arrangement("", arr.source_image.clone(), arr_id, KeywordSource::Manual)
        } else {
            let text = m.text.as_deref().unwrap_or_default();
            Keyword::textual("", m.category, text, KeywordSource::Manual)
                .map_err(recomb_pipeline::PipelineError::from)?
        };
        let (kid, _) = board.add_keyword(kw).map_err(recomb_pipeline::PipelineError::from)?;
        board.select(&kid);
        added.push(kid);
    }
    for kid in &req.deselect {
        board.deselect(kid);
    }
    for kid in &req.select {
        board.select(kid);
    }

    let kind = if req.manual.is_empty() { ActionKind::SelectKeyword } else { ActionKind::AddKeyword };
    let payload = json!({ "select": req.select, "deselect": req.deselect, "added": added });
    commit(&state, &mut board, kind, &payload)?;
    let selected = board.selected().into_iter().cloned().collect();
    Ok(Json(SelectionChanged { added, selected }))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecommendScope {
    /// The selection when it holds textual keywords, otherwise the board.
    #[default]
    Auto,
    Selection,
    Board,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecommendRequest {
    pub scope: RecommendScope,
}

#[derive(Debug, Serialize)]
pub struct Recommended {
    pub scope: RecommendScope,
    pub keywords: Vec<Keyword>,
}

pub async fn recommend(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<Recommended>> {
    let req: RecommendRequest = parse_body(&body)?;
    let _guard = state.lock(&id).await;
    let mut board = load(&state, &id)?;

    let (from_selection, _) = board.gather(board.selected());
    let (from_board, _) = board.gather(board.keywords.iter());
    let (scope, input) = match req.scope {
        RecommendScope::Selection => (RecommendScope::Selection, from_selection),
        RecommendScope::Board => (RecommendScope::Board, from_board),
        RecommendScope::Auto if !from_selection.is_empty() => (RecommendScope::Selection, from_selection),
        RecommendScope::Auto => (RecommendScope::Board, from_board),
    };
    if input.is_empty() {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            "no-keywords",
            "add a reference or a keyword before asking for recommendations",
        ));
    }

    let rec = state.orchestrator().recommend(&input).await?;
    let mut ids = Vec::new();
    for (category, text) in rec.keywords.iter() {
        let kw = Keyword::textual("", category, text, KeywordSource::Recommended)
            .map_err(recomb_pipeline::PipelineError::from)?;
        let (kid, new) = board.add_keyword(kw).map_err(recomb_pipeline::PipelineError::from)?;
        if new {
            ids.push(kid);
        }
    }
    let payload = json!({ "scope": scope, "input": input, "keyword_ids": ids });
    commit(&state, &mut board, ActionKind::Recommend, &payload)?;
    Ok(Json(Recommended { scope, keywords: keywords_by_id(&board, &ids)? }))
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MergeRequest {
    /// Keywords to merge; the current selection when absent.
    pub keyword_ids: Option<Vec<String>>,
}

#[derive(Debug, Serialize)]
pub struct Merged {
    pub drafts: Vec<recomb_core::Recombination>,
    pub degraded: bool,
    pub issues: Vec<String>,
}

pub async fn merge(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<Merged>)> {
    let req: MergeRequest = parse_body(&body)?;
    let _guard = state.lock(&id).await;
    let mut board = load(&state, &id)?;

    let keywords = match &req.keyword_ids {
        Some(ids) => keywords_by_id(&board, ids)?,
        None => board.selected().into_iter().cloned().collect(),
    };
    let keyword_ids: Vec<String> = keywords.iter().map(|k| k.id.clone()).collect();
    let (set, arrangement) = board.gather(keywords.iter());
    let (set, arrangement): (KeywordSet, _) = (set, arrangement.cloned());
    if set.get(KeywordCategory::SubjectMatter).is_empty() {
        return Err(ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "no-subject",
            "select at least one subject matter keyword to merge",
        ));
    }

    let draft_ids: Vec<String> = (0..3).map(|_| board.fresh_id("draft")).collect();
    let out = state.orchestrator().merge(&set, arrangement.as_ref(), &draft_ids).await?;
    let produced: Vec<String> = out.drafts.iter().map(|d| d.id.clone()).collect();
    board.drafts.extend(out.drafts.iter().cloned());

    let payload = json!({ "keyword_ids": keyword_ids, "draft_ids": produced, "degraded": out.degraded });
    commit(&state, &mut board, ActionKind::Merge, &payload)?;
    Ok((
        StatusCode::CREATED,
        Json(Merged { drafts: out.drafts, degraded: out.degraded, issues: out.issues }),
    ))
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SketchRequest {
    pub count: usize,
}

impl Default for SketchRequest {
    fn default() -> Self {
        Self { count: DEFAULT_MORE_SKETCHES }
    }
}

#[derive(Debug, Serialize)]
pub struct SketchesAdded {
    pub draft_id: String,
    pub sketches: Vec<recomb_core::Sketch>,
}

pub async fn more_sketches(
    State(state): State<AppState>,
    Path((id, draft_id)): Path<(String, String)>,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<SketchesAdded>)> {
    let req: SketchRequest = parse_body(&body)?;
    if req.count == 0 || req.count > MAX_SKETCHES_PER_REQUEST {
        return Err(ApiError::bad_request(format!(
            "count must be between 1 and {MAX_SKETCHES_PER_REQUEST}"
        )));
    }
    let _guard = state.lock(&id).await;
    let mut board = load(&state, &id)?;
    let draft = board.draft(&draft_id).cloned().ok_or_else(|| ApiError::not_found("draft", &draft_id))?;

    let sketches = state.orchestrator().more_sketches(&draft, req.count).await?;
    let draft = board.draft_mut(&draft_id).expect("checked above");
    draft.sketches.extend(sketches.iter().cloned());
    if let Some(last) = sketches.last() {
        draft.layout_rank_used = last.rank;
    }
    let ranks: Vec<usize> = sketches.iter().map(|s| s.rank).collect();
    let payload = json!({ "draft_id": draft_id, "ranks": ranks });
    commit(&state, &mut board, ActionKind::MoreSketches, &payload)?;
    Ok((StatusCode::CREATED, Json(SketchesAdded { draft_id, sketches })))
}

pub async fn complete(
    State(state): State<AppState>,
    Path((id, draft_id)): Path<(String, String)>,
) -> ApiResult<Json<recomb_core::Recombination>> {
    let _guard = state.lock(&id).await;
    let mut board = load(&state, &id)?;
    let draft = board.draft_mut(&draft_id).ok_or_else(|| ApiError::not_found("draft", &draft_id))?;
    draft.completed = true;
    let draft = draft.clone();
    commit(&state, &mut board, ActionKind::CompleteSketch, &json!({ "draft_id": draft_id }))?;
    Ok(Json(draft))
}

pub async fn action_log(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let board = load(&state, &id)?;
    let mut out = String::new();
    for record in &board.action_log {
        out.push_str(&serde_json::to_string(record).expect("records serialize"));
        out.push('\n');
    }
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], out).into_response())
}

fn sniff(bytes: &[u8]) -> &'static str {
    if bytes.starts_with(b"\x89PNG\r\n\x1a\n") {
        "image/png"
    } else if bytes.starts_with(&[0xff, 0xd8, 0xff]) {
        "image/jpeg"
    } else {
        "application/octet-stream"
    }
}

pub async fn blob(State(state): State<AppState>, Path(sha): Path<String>) -> ApiResult<Response> {
    let id = BlobId(sha);
    let bytes = state
        .blobs()
        .get(&id)
        .map_err(ApiError::storage)?
        .ok_or_else(|| ApiError::not_found("blob", id.as_str()))?;
    Ok((
        [
            (header::CONTENT_TYPE, sniff(&bytes)),
            (header::CACHE_CONTROL, "public, max-age=31536000, immutable"),
        ],
        bytes,
    )
        .into_response())
}

pub async fn fallback() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not-found", "no such route")
}
