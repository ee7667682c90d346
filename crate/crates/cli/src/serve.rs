//! Local HTTP server for the review UI. Task trees and progress documents
//! are read-only; only annotations can be written.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use foonplan_core::document::{from_json, to_canonical};
use foonplan_core::progress::{correctness, AnnotationSet, Percent, ProgressDocument};
use serde::Serialize;
use serde_json::json;

use crate::commands::{check_id, progress_document, PlanDocument, ANNOTATION_SUFFIX, PROGRESS_SUFFIX, TREE_SUFFIX};
use crate::config::ServeArgs;
use crate::files::write_atomic;
use crate::{CliError, Result};

#[derive(Clone)]
pub struct AppState {
    dir: Arc<PathBuf>,
    writers: Arc<Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>>,
}

impl AppState {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        AppState {
            dir: Arc::new(dir.into()),
            writers: Arc::default(),
        }
    }

    fn file(&self, id: &str, suffix: &str) -> PathBuf {
        self.dir.join(format!("{id}{suffix}"))
    }

    fn writer(&self, id: &str) -> Arc<tokio::sync::Mutex<()>> {
        let mut map = self.writers.lock().expect("writer map poisoned");
        map.entry(id.to_string()).or_default().clone()
    }
}

pub struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

impl From<CliError> for ApiError {
    fn from(e: CliError) -> Self {
        ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
    }
}

type ApiResult<T> = std::result::Result<T, ApiError>;

fn not_found(what: &str, id: &str) -> ApiError {
    ApiError(StatusCode::NOT_FOUND, format!("{what} for recipe {id:?} not found"))
}

fn valid_id(id: &str) -> ApiResult<()> {
    check_id(id).map_err(|e| ApiError(StatusCode::BAD_REQUEST, e.to_string()))
}

fn load<T: serde::de::DeserializeOwned>(path: &Path) -> ApiResult<Option<T>> {
    match std::fs::read_to_string(path) {
        Ok(text) => from_json(&text)
            .map(|p| Some(p.value))
            .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, format!("{}: {e}", path.display()))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(ApiError(StatusCode::INTERNAL_SERVER_ERROR, format!("{}: {e}", path.display()))),
    }
}

fn plan_document(state: &AppState, id: &str) -> ApiResult<PlanDocument> {
    valid_id(id)?;
    load(&state.file(id, TREE_SUFFIX))?.ok_or_else(|| not_found("task tree", id))
}

#[derive(Debug, Serialize)]
pub struct RecipeEntry {
    pub id: String,
    pub dish_type: String,
    pub ingredients: Vec<String>,
    pub annotated: bool,
}

async fn list_recipes(State(state): State<AppState>) -> ApiResult<Json<Vec<RecipeEntry>>> {
    let entries = std::fs::read_dir(state.dir.as_ref())
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, format!("{}: {e}", state.dir.display())))?;
    let mut ids: Vec<String> = entries
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().to_str().and_then(|n| n.strip_suffix(TREE_SUFFIX)).map(String::from))
        .filter(|id| check_id(id).is_ok())
        .collect();
    ids.sort();
    let mut out = Vec::new();
    for id in ids {
        let doc = plan_document(&state, &id)?;
        out.push(RecipeEntry {
            annotated: state.file(&id, ANNOTATION_SUFFIX).exists(),
            dish_type: doc.request.dish_type.clone(),
            ingredients: doc.request.names(),
            id,
        });
    }
    Ok(Json(out))
}

async fn get_tree(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<Json<PlanDocument>> {
    plan_document(&state, &id).map(Json)
}

/// The stored progress document, or one derived from the tree.
async fn get_progress(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> ApiResult<Json<ProgressDocument>> {
    valid_id(&id)?;
    if let Some(doc) = load::<ProgressDocument>(&state.file(&id, PROGRESS_SUFFIX))? {
        return Ok(Json(doc));
    }
    let plan = plan_document(&state, &id)?;
    Ok(Json(progress_document(&plan)?))
}

async fn get_annotations(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> ApiResult<Json<AnnotationSet>> {
    valid_id(&id)?;
    load(&state.file(&id, ANNOTATION_SUFFIX))?
        .map(Json)
        .ok_or_else(|| not_found("annotations", &id))
}

#[derive(Debug, Serialize)]
struct Saved {
    recipe_id: String,
    correctness: Percent,
}

async fn put_annotations(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: String,
) -> ApiResult<Json<Saved>> {
    let plan = plan_document(&state, &id)?;
    let set: AnnotationSet =
        from_json(&body).map_err(|e| ApiError(StatusCode::BAD_REQUEST, e.to_string()))?.value;
    if set.recipe_id != id {
        return Err(ApiError(
            StatusCode::BAD_REQUEST,
            format!("document is for recipe {:?}, not {id:?}", set.recipe_id),
        ));
    }
    let score = correctness(&set.scores, &plan.request.names())
        .map_err(|e| ApiError(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;

    let writer = state.writer(&id);
    let _guard = writer.lock().await;
    write_atomic(&state.file(&id, ANNOTATION_SUFFIX), to_canonical(&set).as_bytes())?;
    Ok(Json(Saved {
        recipe_id: id,
        correctness: score.percent(),
    }))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/recipes", get(list_recipes))
        .route("/recipes/{id}/tree", get(get_tree))
        .route("/recipes/{id}/progress", get(get_progress))
        .route("/recipes/{id}/annotations", get(get_annotations).put(put_annotations))
        .with_state(state)
}

pub fn run(args: &ServeArgs) -> Result<()> {
    if !args.results.is_dir() {
        return Err(CliError::Usage(format!("{} is not a directory", args.results.display())));
    }
    let io = |ctx: &str, e: std::io::Error| CliError::Core(foonplan_core::Error::io(ctx, e));
    let runtime = tokio::runtime::Runtime::new().map_err(|e| io("starting runtime", e))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((args.bind.as_str(), args.port))
            .await
            .map_err(|e| io(&format!("binding {}:{}", args.bind, args.port), e))?;
        log::info!("serving {} on {}:{}", args.results.display(), args.bind, args.port);
        axum::serve(listener, router(AppState::new(&args.results)))
            .await
            .map_err(|e| io("serving", e))
    })
}
