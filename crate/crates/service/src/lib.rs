//! HTTP sessions for live explorations with human experts.
//!
//! Every state change is a call into `fcax-core`; this crate only parses
//! requests, checks expert tokens, persists sessions and renders views.
//! After each mutation the session is parked at its next question, so a
//! `GET` never changes anything.

pub mod error;
pub mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use fcax_core::formats::{artifacts, group_base, implication_line, parse_cxt, parse_imp, SessionDocument, SessionState};
use fcax_core::{
    conflict_report, AttributeSet, AttributeUniverse, CellValue, Counterexample, Exploration, ExpertRef, ImplicationSet,
    IncompleteContext, Phase, Question, ReportOptions, Row, SubsetSchedule, SystemExploration, TieBreak, Verdict,
};
use serde::Deserialize;
use serde_json::{json, Map, Value};

pub use error::{ApiError, ApiResult};
pub use store::Store;

/// Header carrying the token issued to an expert at session creation.
pub const TOKEN_HEADER: &str = "x-expert-token";

#[derive(Clone)]
pub struct AppState {
    store: Arc<Store>,
}

impl AppState {
    pub fn open(data_dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        Ok(Self {
            store: Arc::new(Store::open(data_dir)?),
        })
    }

    pub fn store(&self) -> &Store {
        &self.store
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_state))
        .route("/sessions/{id}/answers", post(post_answer))
        .route("/sessions/{id}/results", get(get_results))
        .route("/sessions/{id}/experts/{expert}/examples", post(upload_examples))
        .with_state(state)
}

/// Serves until the process is stopped.
pub async fn serve(addr: SocketAddr, data_dir: PathBuf) -> std::io::Result<()> {
    let app = router(AppState::open(data_dir)?);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, app).await
}

fn parse_json<'a, T: Deserialize<'a>>(body: &'a [u8]) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed request body: {e}")))
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ExpertSpec {
    Id(String),
    Named { id: String, name: Option<String> },
}

impl ExpertSpec {
    fn into_ref(self) -> ExpertRef {
        match self {
            ExpertSpec::Id(id) => ExpertRef::new(id),
            ExpertSpec::Named { id, name: Some(name) } => ExpertRef::named(id, name),
            ExpertSpec::Named { id, name: None } => ExpertRef::new(id),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateRequest {
    attributes: Vec<String>,
    experts: Vec<ExpertSpec>,
    #[serde(default)]
    mode: Option<String>,
    /// `.imp` text.
    #[serde(default)]
    background: Option<String>,
    /// Expert id to `.cxt` text.
    #[serde(default)]
    examples: Map<String, Value>,
    #[serde(default)]
    subsets: Option<Vec<Vec<String>>>,
    #[serde(default)]
    tie_break: Option<String>,
}

fn examples_for(universe: &AttributeUniverse, experts: &[ExpertRef], given: &Map<String, Value>) -> ApiResult<Vec<IncompleteContext>> {
    for key in given.keys() {
        if !experts.iter().any(|e| &e.id == key) {
            return Err(fcax_core::Error::UnknownExpert(key.clone()).into());
        }
    }
    experts
        .iter()
        .map(|e| match given.get(&e.id) {
            None => Ok(IncompleteContext::empty(universe.clone())),
            Some(Value::String(text)) => Ok(parse_cxt(text)?.context),
            Some(_) => Err(ApiError::bad_request(format!("examples of {:?} must be .cxt text", e.id))),
        })
        .collect()
}

fn build_state(req: CreateRequest) -> ApiResult<SessionState> {
    let universe = AttributeUniverse::new(req.attributes)?;
    let experts: Vec<ExpertRef> = req.experts.into_iter().map(ExpertSpec::into_ref).collect();
    let examples = examples_for(&universe, &experts, &req.examples)?;
    let background = match &req.background {
        Some(text) => parse_imp(text, &universe)?,
        None => ImplicationSet::new(universe.clone()),
    };
    match req.mode.as_deref().unwrap_or("group") {
        "group" => {
            if req.subsets.is_some() || req.tie_break.is_some() {
                return Err(ApiError::bad_request("subsets and tie_break apply to system mode only"));
            }
            let mut x = Exploration::start(universe, experts, examples, background)?;
            x.next_question()?;
            Ok(SessionState::Group(x))
        }
        "system" => {
            if !background.is_empty() {
                return Err(ApiError::bad_request("background applies to group mode only"));
            }
            let ids: Vec<String> = experts.iter().map(|e| e.id.clone()).collect();
            let tie = match req.tie_break.as_deref() {
                None | Some("lexicographic") => TieBreak::Lexicographic,
                Some("reverse-lexicographic") => TieBreak::ReverseLexicographic,
                Some(other) => return Err(ApiError::bad_request(format!("unknown tie_break {other:?}"))),
            };
            let schedule = match &req.subsets {
                Some(s) => SubsetSchedule::custom(&ids, s)?,
                None => SubsetSchedule::full(&ids, tie)?,
            };
            let mut s = SystemExploration::start(universe, experts, examples, None, schedule)?;
            s.next_question()?;
            Ok(SessionState::System(s))
        }
        other => Err(ApiError::bad_request(format!("unknown mode {other:?}"))),
    }
}

async fn create_session(State(app): State<AppState>, body: Bytes) -> ApiResult<impl IntoResponse> {
    let req: CreateRequest = parse_json(&body)?;
    let state = build_state(req)?;
    let id = uuid::Uuid::new_v4().to_string();
    let tokens: Map<String, Value> = state
        .experts()
        .iter()
        .map(|e| (e.id.clone(), json!(uuid::Uuid::new_v4().to_string())))
        .collect();
    let mut doc = SessionDocument::new(state);
    let stamp = now();
    doc.meta.insert("id".into(), json!(id));
    doc.meta.insert("created".into(), json!(stamp));
    doc.meta.insert("updated".into(), json!(stamp));
    doc.meta.insert("tokens".into(), Value::Object(tokens.clone()));
    let view = state_view(&doc);
    app.store.insert(&id, doc)?;
    tracing::info!(%id, "session created");
    Ok((StatusCode::CREATED, Json(json!({ "id": id, "tokens": tokens, "state": view }))))
}

fn names(set: &AttributeSet) -> Vec<&str> {
    set.names().collect()
}

fn question_view(q: &Question) -> Value {
    let outstanding: Map<String, Value> = q
        .outstanding
        .iter()
        .map(|(e, attrs)| (e.clone(), json!(names(attrs))))
        .collect();
    json!({
        "premise": names(&q.premise),
        "pending": names(&q.pending),
        "outstanding": outstanding,
    })
}

fn lines(set: &ImplicationSet) -> Vec<String> {
    set.normalized().iter().map(implication_line).collect()
}

/// The running exploration, if any, with its position in the schedule.
fn running(state: &SessionState) -> (Option<&Exploration>, usize) {
    match state {
        SessionState::Group(x) => (Some(x), 0),
        SessionState::System(s) => (s.exploration(), s.position()),
    }
}

fn phase(state: &SessionState) -> Phase {
    match running(state) {
        (Some(x), _) => x.phase(),
        (None, _) if matches!(state, SessionState::System(s) if s.is_done()) => Phase::Done,
        (None, _) => Phase::Advancing,
    }
}

/// Identifies the open question across the whole session: schedule
/// position and question count of the running exploration.
fn ticket(state: &SessionState) -> Option<String> {
    match running(state) {
        (Some(x), pos) if x.question().is_some() => Some(format!("{pos}:{}", x.transcript().len())),
        _ => None,
    }
}

fn state_view(doc: &SessionDocument) -> Value {
    let state = &doc.state;
    let (x, position) = running(state);
    let question = x.and_then(Exploration::question);
    let (subset, subsets) = match state {
        SessionState::Group(_) => (Value::Null, Value::Null),
        SessionState::System(s) => (json!(s.current_subset()), json!(s.schedule().len())),
    };
    json!({
        "id": doc.meta.get("id"),
        "mode": state.mode(),
        "phase": phase(state).as_str(),
        "attributes": state.universe().names(),
        "experts": state.experts(),
        "subset": subset,
        "subset_index": position,
        "subset_count": subsets,
        "ticket": ticket(state),
        "question": question.as_ref().map(question_view),
        "accepted": x.map(|x| lines(x.accepted())).unwrap_or_default(),
        "created": doc.meta.get("created"),
        "updated": doc.meta.get("updated"),
    })
}

async fn get_state(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    app.store.read(&id, |doc| Ok(Json(state_view(doc)))).await
}

fn check_token(doc: &SessionDocument, headers: &HeaderMap, expert: &str) -> ApiResult<()> {
    if !doc.state.experts().iter().any(|e| e.id == expert) {
        return Err(fcax_core::Error::UnknownExpert(expert.to_string()).into());
    }
    let expected = doc.meta.get("tokens").and_then(|t| t.get(expert)).and_then(Value::as_str);
    let given = headers.get(TOKEN_HEADER).and_then(|v| v.to_str().ok());
    match (expected, given) {
        (Some(a), Some(b)) if a == b => Ok(()),
        _ => Err(ApiError::new(
            StatusCode::FORBIDDEN,
            "E_BAD_TOKEN",
            format!("missing or wrong {TOKEN_HEADER} for expert {expert:?}"),
        )),
    }
}

/// Moves a session whose question closed on to its next question.
fn park(state: &mut SessionState) -> ApiResult<()> {
    match state {
        SessionState::Group(x) => {
            if x.phase() == Phase::Advancing {
                x.next_question()?;
            }
        }
        SessionState::System(s) => {
            s.next_question()?;
        }
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CounterexampleBody {
    name: String,
    /// One of `x`, `o`, `?` per attribute, in attribute order.
    cells: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AnswerRequest {
    expert: String,
    premise: Vec<String>,
    attribute: String,
    verdict: String,
    #[serde(default)]
    counterexample: Option<CounterexampleBody>,
    /// The `ticket` of the question answered; rejects replays across
    /// questions with equal premises.
    #[serde(default)]
    ticket: Option<String>,
}

fn verdict(universe: &AttributeUniverse, req: &AnswerRequest) -> ApiResult<Verdict> {
    match (req.verdict.as_str(), &req.counterexample) {
        ("yes", None) => Ok(Verdict::Yes),
        ("unknown", None) => Ok(Verdict::Unknown),
        ("no", Some(cx)) => {
            if cx.cells.len() != universe.len() {
                return Err(ApiError::bad_request(format!(
                    "counterexample has {} cells for {} attributes",
                    cx.cells.len(),
                    universe.len()
                )));
            }
            let cells = cx
                .cells
                .iter()
                .map(|c| {
                    let mut chars = c.chars();
                    match (chars.next().and_then(CellValue::from_mark), chars.next()) {
                        (Some(v), None) => Ok(v),
                        _ => Err(ApiError::bad_request(format!("cell {c:?} is not one of x, o, ?"))),
                    }
                })
                .collect::<ApiResult<Vec<_>>>()?;
            Ok(Verdict::No(Counterexample::new(cx.name.clone(), Row::from_cells(&cells))))
        }
        ("no", None) => Err(ApiError::bad_request("verdict \"no\" needs a counterexample")),
        ("yes" | "unknown", Some(_)) => Err(ApiError::bad_request("only verdict \"no\" takes a counterexample")),
        (other, _) => Err(ApiError::bad_request(format!("unknown verdict {other:?}"))),
    }
}

fn stale(message: impl Into<String>) -> ApiError {
    ApiError::new(StatusCode::CONFLICT, "E_STALE_QUESTION", message)
}

async fn post_answer(
    State(app): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Json<Value>> {
    let req: AnswerRequest = parse_json(&body)?;
    app.store
        .update(&id, |doc| {
            check_token(doc, &headers, &req.expert)?;
            if let Some(t) = &req.ticket {
                if ticket(&doc.state).as_ref() != Some(t) {
                    return Err(stale(format!("question {t} is no longer open")));
                }
            }
            let universe = doc.state.universe().clone();
            let premise = universe.set(req.premise.iter().map(String::as_str))?;
            let v = verdict(&universe, &req)?;
            match &mut doc.state {
                SessionState::Group(x) => {
                    x.submit_at(&req.expert, &premise, &req.attribute, v)?;
                }
                SessionState::System(s) => {
                    if !s.current_subset().is_some_and(|m| m.contains(&req.expert)) {
                        return Err(stale(format!("expert {:?} is not consulted by the running exploration", req.expert)));
                    }
                    s.submit_at(&req.expert, &premise, &req.attribute, v)?;
                }
            }
            park(&mut doc.state)?;
            doc.meta.insert("updated".into(), json!(now()));
            Ok(Json(state_view(doc)))
        })
        .await
}

async fn upload_examples(
    State(app): State<AppState>,
    Path((id, expert)): Path<(String, String)>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Json<Value>> {
    let text = std::str::from_utf8(&body).map_err(|_| ApiError::bad_request("body must be UTF-8 .cxt text"))?;
    let ctx = parse_cxt(text)?.context;
    app.store
        .update(&id, |doc| {
            check_token(doc, &headers, &expert)?;
            match &mut doc.state {
                SessionState::Group(x) => {
                    x.add_examples(&expert, &ctx)?;
                }
                SessionState::System(s) => {
                    s.add_examples(&expert, &ctx)?;
                }
            }
            park(&mut doc.state)?;
            doc.meta.insert("updated".into(), json!(now()));
            Ok(Json(state_view(doc)))
        })
        .await
}

fn results_view(doc: &SessionDocument) -> ApiResult<Value> {
    let state = &doc.state;
    let (log, examples) = match state {
        SessionState::Group(x) => (x.log(), x.examples()),
        SessionState::System(s) => (s.log(), s.examples()),
    };
    let subsets: Vec<Value> = match state {
        SessionState::Group(_) => Vec::new(),
        SessionState::System(s) => s
            .results()
            .iter()
            .map(|r| json!({ "members": r.members, "background": lines(&r.background), "accepted": lines(&r.accepted) }))
            .collect(),
    };
    let shared = fcax_core::shared_context(log);
    let lattice: Vec<Value> = fcax_core::shared_lattice(&shared)
        .iter()
        .map(|c| json!({ "experts": c.experts, "generators": c.generators }))
        .collect();
    let files = artifacts(state)?;
    Ok(json!({
        "in_progress": phase(state) != Phase::Done,
        "mode": state.mode(),
        "phase": phase(state).as_str(),
        "accepted": lines(&group_base(state)),
        "subsets": subsets,
        "lattice": lattice,
        "dot": files["lattice.dot"],
        "report": conflict_report(log, examples, ReportOptions::default())?.to_json(),
        "artifacts": files,
    }))
}

async fn get_results(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    app.store.read(&id, |doc| Ok(Json(results_view(doc)?))).await
}
