//! JSON service over one in-memory session.
//!
//! Mutations are serialized by a writer lock and publish a new immutable
//! snapshot; reads clone the current snapshot and never wait on a computation.

use std::sync::{Arc, RwLock};

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use trusskit::io::{parse_truss, serialize_truss};
use trusskit::lattice::{self, PatchSpec};
use trusskit::rigidity::{analyze, AnalysisReport};
use trusskit::wagon::wagon_rows;
use trusskit::{Error, Truss};

use crate::error::{classify, CliError, CliResult, Kind};

pub const TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Removed,
    Restored,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub step: usize,
    pub edge: usize,
    pub action: Action,
    /// Removal set after this step, sorted.
    pub removed: Vec<usize>,
    pub c: usize,
    pub nullity: usize,
    pub recoverable: bool,
}

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub id: u64,
    pub base: Arc<Truss>,
    pub truss: Truss,
    pub analysis: AnalysisReport<f64>,
    pub history: Vec<HistoryEntry>,
}

impl Snapshot {
    fn fresh(id: u64, base: Truss) -> Result<Snapshot, Error> {
        let analysis = analyze(&base, TOL)?;
        Ok(Snapshot { id, base: Arc::new(base.clone()), truss: base, analysis, history: Vec::new() })
    }

    pub fn removed(&self) -> Vec<usize> {
        (0..self.truss.num_edges()).filter(|i| self.truss.edge(*i).removed).collect()
    }
}

pub struct Session {
    current: RwLock<Arc<Snapshot>>,
    writer: tokio::sync::Mutex<()>,
}

pub type SharedSession = Arc<Session>;

impl Session {
    pub fn new(base: Truss) -> CliResult<SharedSession> {
        let snap = Snapshot::fresh(0, base)?;
        Ok(Arc::new(Session { current: RwLock::new(Arc::new(snap)), writer: tokio::sync::Mutex::new(()) }))
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().expect("snapshot lock").clone()
    }

    fn publish(&self, s: Snapshot) -> Arc<Snapshot> {
        let s = Arc::new(s);
        *self.current.write().expect("snapshot lock") = s.clone();
        s
    }
}

/// Body of every analysis response; `analysis` keeps the library field names.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnalysisResponse {
    pub snapshot: u64,
    pub analysis: AnalysisReport<f64>,
    pub removed: Vec<usize>,
    pub disconnected: bool,
}

impl From<&Snapshot> for AnalysisResponse {
    fn from(s: &Snapshot) -> Self {
        AnalysisResponse {
            snapshot: s.id,
            analysis: s.analysis.clone(),
            removed: s.removed(),
            disconnected: !s.truss.is_connected(),
        }
    }
}

pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, message: message.into() }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match (&e, classify(&e)) {
            (Error::UnknownEdge(_), _) => StatusCode::NOT_FOUND,
            (_, Kind::Input) => StatusCode::BAD_REQUEST,
            (_, Kind::Math) => StatusCode::UNPROCESSABLE_ENTITY,
            (_, Kind::Internal) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.message }))).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Debug, Default, Deserialize)]
pub struct Expect {
    /// Snapshot id the client last saw; a mismatch is a conflict.
    pub snapshot: Option<u64>,
}

fn check_expected(s: &Snapshot, q: &Expect) -> Result<(), ApiError> {
    match q.snapshot {
        Some(id) if id != s.id => {
            Err(ApiError::new(StatusCode::CONFLICT, format!("snapshot {id} is stale; current is {}", s.id)))
        }
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct TrussResponse {
    snapshot: u64,
    truss: Value,
}

async fn get_truss(State(s): State<SharedSession>) -> ApiResult<TrussResponse> {
    let snap = s.snapshot();
    let truss = serde_json::from_str(&serialize_truss(&snap.truss)).map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    Ok(Json(TrussResponse { snapshot: snap.id, truss }))
}

async fn replace_base(s: &Session, truss: Truss) -> ApiResult<AnalysisResponse> {
    let _w = s.writer.lock().await;
    let id = s.snapshot().id + 1;
    let snap = Snapshot::fresh(id, truss)?;
    Ok(Json(AnalysisResponse::from(&*s.publish(snap))))
}

async fn put_truss(State(s): State<SharedSession>, body: String) -> ApiResult<AnalysisResponse> {
    let parsed = parse_truss(&body)?;
    replace_base(&s, parsed.truss).await
}

/// `{"shape": "rhombus", "n": 3}` and friends; `periodic` tiles a cell.
async fn generate(State(s): State<SharedSession>, Json(mut body): Json<Value>) -> ApiResult<AnalysisResponse> {
    let obj = body.as_object_mut().ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "expected a JSON object"))?;
    let periodic = obj.remove("periodic").map(|v| v.as_u64().map(|n| n as usize)).unwrap_or(Some(1));
    let periodic = periodic.ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "periodic must be a positive integer"))?;
    let shape = obj.remove("shape").ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "missing field shape"))?;
    obj.insert("kind".into(), shape);
    let spec: PatchSpec = serde_json::from_value(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
    let mut t: Truss = lattice::gen_patch(&spec)?;
    if periodic != 1 {
        t = lattice::gen_periodic(&t, periodic)?;
    }
    replace_base(&s, t).await
}

async fn toggle(State(s): State<SharedSession>, Path(id): Path<usize>, Query(q): Query<Expect>) -> ApiResult<AnalysisResponse> {
    let _w = s.writer.lock().await;
    let cur = s.snapshot();
    check_expected(&cur, &q)?;
    let truss = cur.truss.toggle_edge(id)?;
    let analysis = analyze(&truss, TOL)?;
    let action = if truss.edge(id).removed { Action::Removed } else { Action::Restored };
    let mut history = cur.history.clone();
    let next = Snapshot { id: cur.id + 1, base: cur.base.clone(), truss, analysis, history: Vec::new() };
    history.push(HistoryEntry {
        step: history.len() + 1,
        edge: id,
        action,
        removed: next.removed(),
        c: next.analysis.c,
        nullity: next.analysis.nullity,
        recoverable: next.analysis.is_inf_rigid,
    });
    let next = Snapshot { history, ..next };
    Ok(Json(AnalysisResponse::from(&*s.publish(next))))
}

async fn get_analysis(State(s): State<SharedSession>) -> Json<AnalysisResponse> {
    Json(AnalysisResponse::from(&*s.snapshot()))
}

async fn get_flexes(State(s): State<SharedSession>) -> Json<Vec<Vec<f64>>> {
    Json(s.snapshot().analysis.flex_basis.clone())
}

#[derive(Serialize)]
struct WagonRowOut {
    center: usize,
    /// Edge id to coefficient on the length rate.
    coefficients: Vec<(usize, f64)>,
}

async fn get_wagonwheels(State(s): State<SharedSession>) -> ApiResult<Vec<WagonRowOut>> {
    let snap = s.snapshot();
    let centers = snap.truss.interior_vertices()?;
    let rows = wagon_rows(&snap.truss, &centers)?;
    Ok(Json(
        rows.into_iter()
            .map(|r| WagonRowOut { center: r.center, coefficients: r.coefficients.into_iter().collect() })
            .collect(),
    ))
}

async fn get_history(State(s): State<SharedSession>) -> Json<Vec<HistoryEntry>> {
    Json(s.snapshot().history.clone())
}

async fn reset(State(s): State<SharedSession>, Query(q): Query<Expect>) -> ApiResult<AnalysisResponse> {
    let _w = s.writer.lock().await;
    let cur = s.snapshot();
    check_expected(&cur, &q)?;
    let snap = Snapshot::fresh(cur.id + 1, (*cur.base).clone())?;
    Ok(Json(AnalysisResponse::from(&*s.publish(snap))))
}

pub fn router(session: SharedSession) -> Router {
    Router::new()
        .route("/api/truss", get(get_truss).put(put_truss))
        .route("/api/generate", post(generate))
        .route("/api/edges/:id/toggle", post(toggle))
        .route("/api/analysis", get(get_analysis))
        .route("/api/flexes", get(get_flexes))
        .route("/api/wagonwheels", get(get_wagonwheels))
        .route("/api/history", get(get_history))
        .route("/api/reset", post(reset))
        .with_state(session)
}

pub async fn serve(port: u16, base: Truss) -> CliResult<()> {
    let session = Session::new(base)?;
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port))
        .await
        .map_err(|e| CliError::input(format!("cannot bind port {port}: {e}")))?;
    let addr = listener.local_addr().map_err(|e| CliError::internal(e.to_string()))?;
    eprintln!("listening on http://{addr}/api");
    axum::serve(listener, router(session)).await.map_err(|e| CliError::internal(e.to_string()))
}
