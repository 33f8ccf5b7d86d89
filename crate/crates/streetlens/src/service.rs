//! HTTP facade over the corpus, training, scoring, analysis, and triage.
//!
//! | method | path | body / query | reply |
//! |---|---|---|---|
//! | GET | `/corpus/stats` | | profile and label counts, model, queue sizes |
//! | POST | `/corpus/ingest` | `{path}` or `{records}` (JSONL text), `cap_policy` | replaces the corpus, replays the label log |
//! | GET | `/corpus/labels` | `?profile_id=` | label-log entries |
//! | POST | `/train` | `{spec, blocks, mode, min_df?}` | 202; 409 while a job runs |
//! | GET | `/train/status` | | current or last job |
//! | POST | `/cv` | `{spec, blocks, mode, k?, min_df?, rng_seed?}` | `EvalReport` |
//! | POST | `/score` | `{include_labeled?}` | predictions; rebuilds the queue |
//! | GET | `/triage/next` | | top pending item, or 204 |
//! | GET | `/triage/queue` | `?offset&limit&min_score&max_score&status&provenance` | `QueuePage` |
//! | POST | `/triage/{id}/label` | `{label, annotator}` | recorded / unchanged; 409 on conflict |
//! | GET | `/analysis/{stat}` | `?block&k&a&b&keywords&format=tsv` | per-class statistics |
//!
//! With a token configured every request needs `Authorization: Bearer <token>`.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::{Path, Query, Request, State};
use axum::http::{header, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use streetlens_core::analysis::{self, Comparison};
use streetlens_core::clients::MediaSource;
use streetlens_core::corpus::{CapPolicy, CorpusSnapshot, Label, LabelCounts, LabelEvent, Provenance};
use streetlens_core::eval::{cross_validate_corpus, CvConfig, EvalReport};
use streetlens_core::features::{Block, BlockSet, DocContext, FusionMode, MinDf, ProfileDoc};
use streetlens_core::models::{ModelArtifact, ModelSpec};
use streetlens_core::scoring::{fit_artifact, score_docs, ScoredProfile};
use streetlens_core::textprep::TextPipeline;

use crate::config::Config;
use crate::io::{parse_corpus, read_corpus, write_file};
use crate::labels::{now, LabelLog};
use crate::triage::{decide, Decision, Evidence, EvidenceSources, ItemStatus, QueueFilter, QueuePage, TriageItem, TriageQueue};

/// Shared service state. Reads take short locks; label writes go through
/// one mutex so the corpus and the label log change together.
pub struct AppState {
    pipeline: TextPipeline,
    media: Arc<dyn MediaSource + Send + Sync>,
    curse_lexicon: BTreeSet<String>,
    keywords: Vec<String>,
    top_k: usize,
    comment_cap: usize,
    min_df: MinDf,
    token: Option<String>,
    model_path: Option<PathBuf>,
    log: LabelLog,
    corpus: RwLock<CorpusSnapshot>,
    label_writes: Mutex<()>,
    model: RwLock<Option<Arc<ModelArtifact>>>,
    train: Mutex<TrainStatus>,
    queue: RwLock<TriageQueue>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainState {
    Idle,
    Running,
    Succeeded,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainStatus {
    pub state: TrainState,
    pub request: Option<TrainRequest>,
    pub started_at: Option<String>,
    pub finished_at: Option<String>,
    pub error: Option<String>,
    pub fingerprint: Option<String>,
    pub vocabulary_size: Option<usize>,
}

impl TrainStatus {
    fn idle() -> Self {
        TrainStatus {
            state: TrainState::Idle,
            request: None,
            started_at: None,
            finished_at: None,
            error: None,
            fingerprint: None,
            vocabulary_size: None,
        }
    }
}

impl AppState {
    /// Load the corpus named by the config (if any), replay the label log,
    /// and load a previously saved model when present.
    pub fn from_config(config: &Config) -> anyhow::Result<Self> {
        let corpus = match &config.corpus {
            Some(p) if p.exists() => read_corpus(p, config.cap_policy)?.snapshot,
            _ => CorpusSnapshot::default(),
        };
        let log = LabelLog::open(config.label_log.clone().unwrap_or_else(|| PathBuf::from("labels.jsonl")));
        let (corpus, _) = log.replay_onto(&corpus)?;
        let model = match &config.service.model {
            Some(p) if p.exists() => Some(Arc::new(crate::model_file::load(p)?)),
            _ => None,
        };
        Ok(AppState {
            pipeline: config.pipeline()?,
            media: config.media()?,
            curse_lexicon: config.curse_lexicon()?,
            keywords: config.analysis.youtube_keywords.clone(),
            top_k: config.analysis.top_k,
            comment_cap: config.features.comment_cap,
            min_df: config.features.min_df,
            token: config.service.token.clone(),
            model_path: config.service.model.clone(),
            log,
            corpus: RwLock::new(corpus),
            label_writes: Mutex::new(()),
            model: RwLock::new(model),
            train: Mutex::new(TrainStatus::idle()),
            queue: RwLock::new(TriageQueue::default()),
        })
    }

    pub fn corpus(&self) -> CorpusSnapshot {
        self.corpus.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    pub fn model(&self) -> Option<Arc<ModelArtifact>> {
        self.model.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    pub fn label_log(&self) -> &LabelLog {
        &self.log
    }

    fn docs(&self, corpus: &CorpusSnapshot, labeled_only: bool) -> Vec<ProfileDoc> {
        let ctx = DocContext::new(&self.pipeline, self.media.as_ref()).with_comment_cap(self.comment_cap);
        corpus.iter().filter(|p| !labeled_only || p.label.class().is_some()).map(|p| ctx.build(p)).collect()
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/corpus/stats", get(corpus_stats))
        .route("/corpus/ingest", post(corpus_ingest))
        .route("/corpus/labels", get(corpus_labels))
        .route("/train", post(train))
        .route("/train/status", get(train_status))
        .route("/cv", post(cv))
        .route("/score", post(score))
        .route("/triage/next", get(triage_next))
        .route("/triage/queue", get(triage_queue))
        .route("/triage/{id}/label", post(triage_label))
        .route("/analysis/{stat}", get(analysis_stat))
        .layer(middleware::from_fn_with_state(state.clone(), require_token))
        .with_state(state)
}

pub async fn serve(state: Arc<AppState>, bind: &str) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(bind).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
    detail: Option<serde_json::Value>,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, message: message.into(), detail: None }
    }

    fn bad_request(message: impl ToString) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, message.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.message });
        if let Some(d) = self.detail {
            body["detail"] = d;
        }
        (self.status, Json(body)).into_response()
    }
}

impl From<streetlens_core::Error> for ApiError {
    fn from(e: streetlens_core::Error) -> Self {
        use streetlens_core::Error as E;
        let status = match e {
            E::UnknownProfile(_) => StatusCode::NOT_FOUND,
            E::FingerprintMismatch { .. } | E::DimensionMismatch { .. } => StatusCode::CONFLICT,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError::new(status, e.to_string())
    }
}

impl From<crate::Error> for ApiError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::Core(c) => c.into(),
            other => ApiError::bad_request(other),
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

async fn require_token(State(state): State<Arc<AppState>>, req: Request, next: Next) -> Response {
    if let Some(token) = &state.token {
        let presented = req
            .headers()
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "));
        if presented != Some(token.as_str()) {
            return ApiError::new(StatusCode::UNAUTHORIZED, "missing or wrong bearer token").into_response();
        }
    }
    next.run(req).await
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CorpusStats {
    pub profiles: usize,
    pub counts: LabelCounts,
    pub label_log_entries: usize,
    pub model: Option<ModelSummary>,
    pub queue_total: usize,
    pub queue_pending: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ModelSummary {
    pub algorithm: String,
    pub blocks: BlockSet,
    pub mode: FusionMode,
    pub fingerprint: String,
    pub vocabulary_size: usize,
}

fn summarize(m: &ModelArtifact) -> ModelSummary {
    ModelSummary {
        algorithm: m.model.spec.algorithm.to_string(),
        blocks: m.blocks,
        mode: m.mode,
        fingerprint: m.vocabulary.fingerprint().to_hex(),
        vocabulary_size: m.vocabulary.dim(),
    }
}

async fn corpus_stats(State(state): State<Arc<AppState>>) -> ApiResult<Json<CorpusStats>> {
    let corpus = state.corpus();
    let queue = state.queue.read().unwrap_or_else(|e| e.into_inner());
    Ok(Json(CorpusStats {
        profiles: corpus.len(),
        counts: corpus.counts(),
        label_log_entries: state.log.read()?.len(),
        model: state.model().as_deref().map(summarize),
        queue_total: queue.len(),
        queue_pending: queue.pending(),
    }))
}

#[derive(Debug, Deserialize)]
pub struct IngestRequest {
    pub path: Option<PathBuf>,
    pub records: Option<String>,
    #[serde(default)]
    pub cap_policy: CapPolicy,
}

async fn corpus_ingest(
    State(state): State<Arc<AppState>>,
    Json(req): Json<IngestRequest>,
) -> ApiResult<Json<serde_json::Value>> {
    let ingested = match (&req.path, &req.records) {
        (Some(p), None) => read_corpus(p, req.cap_policy)?,
        (None, Some(text)) => parse_corpus(text, std::path::Path::new("<request>"), req.cap_policy)?,
        _ => return Err(ApiError::bad_request("give exactly one of `path` or `records`")),
    };
    let _writes = state.label_writes.lock().unwrap_or_else(|e| e.into_inner());
    let (corpus, skipped) = state.log.replay_onto(&ingested.snapshot)?;
    let body = json!({
        "profiles": corpus.len(),
        "counts": corpus.counts(),
        "warnings": ingested.warnings,
        "skipped_log_events": skipped,
    });
    *state.corpus.write().unwrap_or_else(|e| e.into_inner()) = corpus;
    *state.queue.write().unwrap_or_else(|e| e.into_inner()) = TriageQueue::default();
    Ok(Json(body))
}

#[derive(Debug, Deserialize)]
struct LabelsQuery {
    profile_id: Option<String>,
}

async fn corpus_labels(
    State(state): State<Arc<AppState>>,
    Query(q): Query<LabelsQuery>,
) -> ApiResult<Json<Vec<LabelEvent>>> {
    let mut events = state.log.read()?;
    if let Some(id) = q.profile_id {
        events.retain(|e| e.profile_id == id);
    }
    Ok(Json(events))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainRequest {
    pub spec: ModelSpec,
    pub blocks: BlockSet,
    #[serde(default)]
    pub mode: FusionMode,
    pub min_df: Option<MinDf>,
}

async fn train(State(state): State<Arc<AppState>>, Json(req): Json<TrainRequest>) -> ApiResult<Response> {
    {
        let mut status = state.train.lock().unwrap_or_else(|e| e.into_inner());
        if status.state == TrainState::Running {
            return Err(ApiError::new(StatusCode::CONFLICT, "a training job is already running"));
        }
        *status = TrainStatus {
            state: TrainState::Running,
            request: Some(req.clone()),
            started_at: Some(now()),
            ..TrainStatus::idle()
        };
    }
    let job = state.clone();
    tokio::task::spawn_blocking(move || {
        let result = run_training(&job, &req);
        let mut status = job.train.lock().unwrap_or_else(|e| e.into_inner());
        status.finished_at = Some(now());
        match result {
            Ok(artifact) => {
                status.state = TrainState::Succeeded;
                status.fingerprint = Some(artifact.vocabulary.fingerprint().to_hex());
                status.vocabulary_size = Some(artifact.vocabulary.dim());
                *job.model.write().unwrap_or_else(|e| e.into_inner()) = Some(Arc::new(artifact));
            }
            Err(e) => {
                log::warn!("training failed: {e}");
                status.state = TrainState::Failed;
                status.error = Some(e);
            }
        }
    });
    let status = state.train.lock().unwrap_or_else(|e| e.into_inner()).clone();
    Ok((StatusCode::ACCEPTED, Json(status)).into_response())
}

fn run_training(state: &AppState, req: &TrainRequest) -> Result<ModelArtifact, String> {
    let corpus = state.corpus();
    let docs = state.docs(&corpus, true);
    let artifact = fit_artifact(&docs, &req.spec, req.blocks, req.mode, req.min_df.unwrap_or(state.min_df))
        .map_err(|e| e.to_string())?;
    if let Some(path) = &state.model_path {
        write_file(path, &artifact.to_json()).map_err(|e| e.to_string())?;
    }
    Ok(artifact)
}

async fn train_status(State(state): State<Arc<AppState>>) -> Json<TrainStatus> {
    Json(state.train.lock().unwrap_or_else(|e| e.into_inner()).clone())
}

#[derive(Debug, Deserialize)]
pub struct CvRequest {
    pub spec: ModelSpec,
    pub blocks: BlockSet,
    #[serde(default)]
    pub mode: FusionMode,
    pub k: Option<usize>,
    pub min_df: Option<MinDf>,
    pub rng_seed: Option<u64>,
}

async fn cv(State(state): State<Arc<AppState>>, Json(req): Json<CvRequest>) -> ApiResult<Json<EvalReport>> {
    let mut config = CvConfig::new(req.spec, req.blocks, req.mode);
    config.k = req.k.unwrap_or(config.k);
    config.min_df = req.min_df.unwrap_or(state.min_df);
    config.rng_seed = req.rng_seed.unwrap_or(config.spec.rng_seed);
    let job = state.clone();
    let report = tokio::task::spawn_blocking(move || {
        let corpus = job.corpus();
        let ctx = DocContext::new(&job.pipeline, job.media.as_ref()).with_comment_cap(job.comment_cap);
        cross_validate_corpus(&corpus, &ctx, &config)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    Ok(Json(report))
}

#[derive(Debug, Default, Deserialize)]
pub struct ScoreRequest {
    #[serde(default)]
    pub include_labeled: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ScoreResponse {
    pub fingerprint: String,
    pub scored: Vec<ScoredProfile>,
    pub queue_size: usize,
}

async fn score(State(state): State<Arc<AppState>>, Json(req): Json<ScoreRequest>) -> ApiResult<Json<ScoreResponse>> {
    let model = state.model().ok_or_else(|| ApiError::new(StatusCode::CONFLICT, "no trained model"))?;
    let job = state.clone();
    let (scored, queue) = tokio::task::spawn_blocking(move || -> ApiResult<_> {
        let corpus = job.corpus();
        let docs = job.docs(&corpus, false);
        let scored = score_docs(&model, &docs, req.include_labeled)?;
        let src = EvidenceSources { media: job.media.as_ref(), keywords: &job.keywords, terms_per_block: 10 };
        let items = scored
            .iter()
            .map(|s| {
                let record = corpus.get(&s.profile_id).expect("scored ids come from the corpus");
                let doc = docs.iter().find(|d| d.profile_id == s.profile_id).expect("one doc per profile");
                let mut item = TriageItem::new(s, record.provenance, Evidence::collect(record, doc, &model, src));
                if record.label != Label::Unlabeled {
                    item.status = if record.label.class().is_some() { ItemStatus::Labeled } else { ItemStatus::Skipped };
                    item.label = Some(record.label);
                }
                item
            })
            .collect();
        Ok((scored, TriageQueue::new(items)))
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    let fingerprint = state.model().map(|m| m.vocabulary.fingerprint().to_hex()).unwrap_or_default();
    let queue_size = queue.len();
    *state.queue.write().unwrap_or_else(|e| e.into_inner()) = queue;
    Ok(Json(ScoreResponse { fingerprint, scored, queue_size }))
}

async fn triage_next(State(state): State<Arc<AppState>>) -> Response {
    match state.queue.read().unwrap_or_else(|e| e.into_inner()).next() {
        Some(item) => Json(item.clone()).into_response(),
        None => StatusCode::NO_CONTENT.into_response(),
    }
}

#[derive(Debug, Deserialize)]
struct QueueQuery {
    #[serde(default)]
    offset: usize,
    limit: Option<usize>,
    min_score: Option<f64>,
    max_score: Option<f64>,
    status: Option<ItemStatus>,
    provenance: Option<Provenance>,
}

async fn triage_queue(State(state): State<Arc<AppState>>, Query(q): Query<QueueQuery>) -> Json<QueuePage> {
    let filter = QueueFilter { min_score: q.min_score, max_score: q.max_score, status: q.status, provenance: q.provenance };
    let queue = state.queue.read().unwrap_or_else(|e| e.into_inner());
    Json(queue.page(&filter, q.offset, q.limit.unwrap_or(50).min(500)))
}

#[derive(Debug, Deserialize)]
pub struct LabelRequest {
    pub label: Label,
    pub annotator: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LabelResponse {
    pub decision: Decision,
    pub label: Label,
    pub event: Option<LabelEvent>,
}

async fn triage_label(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<LabelRequest>,
) -> ApiResult<Json<LabelResponse>> {
    if req.label == Label::Unlabeled {
        return Err(ApiError::bad_request("label must be gang, nongang, or unsure"));
    }
    if req.annotator.trim().is_empty() {
        return Err(ApiError::bad_request("annotator is required"));
    }
    let _writes = state.label_writes.lock().unwrap_or_else(|e| e.into_inner());
    let corpus = state.corpus();
    let current = corpus.get(&id).ok_or_else(|| streetlens_core::Error::UnknownProfile(id.clone()))?.label;
    match decide(current, req.label) {
        Decision::Conflict => Err(ApiError {
            status: StatusCode::CONFLICT,
            message: format!("profile `{id}` is already labeled {current}"),
            detail: Some(json!({ "current_label": current })),
        }),
        Decision::Unchanged => Ok(Json(LabelResponse { decision: Decision::Unchanged, label: current, event: None })),
        Decision::Apply => {
            let (next, event) = state.log.record(&corpus, &id, req.label, req.annotator.trim())?;
            *state.corpus.write().unwrap_or_else(|e| e.into_inner()) = next;
            state.queue.write().unwrap_or_else(|e| e.into_inner()).mark(&id, req.label);
            Ok(Json(LabelResponse { decision: Decision::Apply, label: req.label, event: Some(event) }))
        }
    }
}

#[derive(Debug, Deserialize)]
struct AnalysisQuery {
    block: Option<String>,
    k: Option<usize>,
    a: Option<String>,
    b: Option<String>,
    keywords: Option<String>,
    format: Option<String>,
}

async fn analysis_stat(
    State(state): State<Arc<AppState>>,
    Path(stat): Path<String>,
    Query(q): Query<AnalysisQuery>,
) -> ApiResult<Response> {
    let tsv = q.format.as_deref() == Some("tsv");
    // Media lookups may go to a live client, which blocks.
    let (value, table) = tokio::task::spawn_blocking(move || compute_stat(&state, &stat, q))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    if tsv {
        return Ok(([(header::CONTENT_TYPE, "text/tab-separated-values; charset=utf-8")], table).into_response());
    }
    Ok(Json(value).into_response())
}

fn compute_stat(state: &AppState, stat: &str, q: AnalysisQuery) -> ApiResult<(serde_json::Value, String)> {
    let corpus = state.corpus();
    let k = q.k.unwrap_or(state.top_k);
    let (value, table) = match stat {
        "top_terms" => {
            let block: Block = q.block.as_deref().unwrap_or("T").parse()?;
            let docs = state.docs(&corpus, true);
            let cmp = Comparison::compute(|c| analysis::top_terms(&docs, c, block, k));
            (serde_json::to_value(&cmp), analysis::top_terms_tsv(&cmp))
        }
        "curse_rate" => {
            let cmp = Comparison::try_compute(|c| analysis::curse_rate(&corpus, c, &state.curse_lexicon))?;
            (serde_json::to_value(&cmp), analysis::curse_rate_tsv(&cmp))
        }
        "emoji" => {
            let cmp = Comparison::compute(|c| analysis::emoji_stats(&corpus, c, Some(k)));
            (serde_json::to_value(&cmp), analysis::emoji_stats_tsv(&cmp))
        }
        "chains" => {
            let a = q.a.unwrap_or_else(|| crate::synth::COP.to_string());
            let b = q.b.unwrap_or_else(|| crate::synth::PISTOL.to_string());
            let cmp = Comparison::compute(|c| analysis::chain_cooccurrence(&corpus, c, &a, &b));
            (serde_json::to_value(&cmp), analysis::chain_cooccurrence_tsv(&a, &b, &cmp))
        }
        "youtube" => {
            let keywords: Vec<String> = match &q.keywords {
                Some(list) => list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
                None => state.keywords.clone(),
            };
            let cmp = Comparison::compute(|c| analysis::youtube_stats(&corpus, c, &keywords, state.media.as_ref()));
            (serde_json::to_value(&cmp), analysis::youtube_stats_tsv(&cmp))
        }
        other => return Err(ApiError::new(StatusCode::NOT_FOUND, format!("unknown statistic `{other}`"))),
    };
    let value = value.map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    Ok((value, table))
}
