//! Local HTTP render service.
//!
//! | route                 | body                       | response            |
//! |-----------------------|----------------------------|---------------------|
//! | `GET /symptoms`       |                            | parameter schema    |
//! | `POST /render`        | [`RenderRequest`] JSON     | `image/png`         |
//! | `POST /session`       | `{"seed": u64}` (optional) | `{"id", "seed"}`    |
//! | `GET /profiles`       |                            | `{"profiles": [..]}`|
//! | `GET /profiles/{name}`|                            | profile document    |
//! | `PUT /profiles/{name}`| profile document           | stored document     |

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use base64::Engine;
use serde::Deserialize;
use serde_json::{json, Value};
use visim_core::io::{decode_image, encode_png, image_dimensions, MAX_PIXELS};
use visim_core::pipeline::validate;
use visim_core::profiles::{canonical, preset, presets};
use visim_core::rng::mix64;
use visim_core::{Error, Profile, SessionState};

use crate::cli::file_stem;
use crate::render::render_frame;
use crate::schema::symptom_schema;

/// Request bodies carry base64 images up to the pixel limit.
const BODY_LIMIT: usize = 512 * 1024 * 1024;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderRequest {
    /// Inline profile document.
    #[serde(default)]
    pub profile: Option<Value>,
    /// Name of a stored profile or preset; used when `profile` is absent.
    #[serde(default)]
    pub profile_name: Option<String>,
    /// Base64 PNG or PPM.
    pub image: String,
    /// Normalized gaze, clamped to `[0, 1]^2`.
    #[serde(default = "centered")]
    pub gaze: [f64; 2],
    #[serde(default)]
    pub time: f64,
    /// Session id from `POST /session`; without one each request is
    /// rendered from a fresh state seeded by the profile.
    #[serde(default)]
    pub session: Option<u64>,
}

fn centered() -> [f64; 2] {
    [0.5, 0.5]
}

#[derive(Debug, Default, Deserialize)]
struct SessionRequest {
    seed: Option<u64>,
}

type Session = Arc<Mutex<SessionState>>;

#[derive(Clone)]
pub struct AppState {
    profile_dir: Arc<PathBuf>,
    sessions: Arc<Mutex<HashMap<u64, Session>>>,
    next_id: Arc<AtomicU64>,
}

impl AppState {
    pub fn new(profile_dir: impl Into<PathBuf>) -> Self {
        AppState {
            profile_dir: Arc::new(profile_dir.into()),
            sessions: Arc::default(),
            next_id: Arc::new(AtomicU64::new(1)),
        }
    }

    fn session(&self, id: u64) -> Option<Session> {
        self.sessions.lock().unwrap().get(&id).cloned()
    }

    fn stored_profile(&self, name: &str) -> Result<Profile, ApiError> {
        let path = self.profile_dir.join(format!("{}.json", file_stem(name)));
        if path.is_file() {
            return Profile::load(&path).map_err(ApiError::from);
        }
        preset(name)
            .or_else(|| presets().into_iter().find(|p| file_stem(&p.name) == name))
            .ok_or_else(|| ApiError::not_found(format!("no profile named {name:?}")))
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: json!({ "error": message.into() }),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, message)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        match e {
            Error::Validation(report) => ApiError {
                status: StatusCode::BAD_REQUEST,
                body: json!({ "error": "configuration rejected", "report": report }),
            },
            Error::Io(e) => Self::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
            other => Self::bad_request(other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

fn json_response(status: StatusCode, value: &Value) -> Response {
    (
        status,
        [(header::CONTENT_TYPE, "application/json")],
        canonical::to_string(value),
    )
        .into_response()
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/symptoms", get(symptoms))
        .route("/render", post(render))
        .route("/session", post(create_session))
        .route("/profiles", get(list_profiles))
        .route("/profiles/{name}", get(get_profile).put(put_profile))
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(state)
}

async fn symptoms() -> Response {
    json_response(StatusCode::OK, &symptom_schema())
}

async fn create_session(State(state): State<AppState>, body: Option<Json<SessionRequest>>) -> Response {
    let id = state.next_id.fetch_add(1, Ordering::Relaxed);
    let seed = body.and_then(|Json(b)| b.seed).unwrap_or_else(|| mix64(id));
    state
        .sessions
        .lock()
        .unwrap()
        .insert(id, Arc::new(Mutex::new(SessionState::new(seed))));
    log::info!("session {id} created with seed {seed}");
    json_response(StatusCode::OK, &json!({ "id": id, "seed": seed }))
}

async fn render(State(state): State<AppState>, Json(req): Json<RenderRequest>) -> Result<Response, ApiError> {
    let profile = match (&req.profile, &req.profile_name) {
        (Some(doc), _) => Profile::from_value_with_warnings(doc)?.0,
        (None, Some(name)) => state.stored_profile(name)?,
        (None, None) => return Err(ApiError::bad_request("request needs `profile` or `profile_name`")),
    };
    let report = validate(&profile.stack);
    if !report.is_ok() {
        return Err(Error::Validation(report).into());
    }
    let bytes = base64::engine::general_purpose::STANDARD
        .decode(req.image.trim())
        .map_err(|e| ApiError::bad_request(format!("image is not base64: {e}")))?;
    let (w, h) = image_dimensions(&bytes)?;
    if w as u64 * h as u64 > MAX_PIXELS {
        return Err(ApiError::new(
            StatusCode::PAYLOAD_TOO_LARGE,
            format!("{w}x{h} exceeds the {MAX_PIXELS}-pixel limit"),
        ));
    }
    let session = match req.session {
        Some(id) => Some(
            state
                .session(id)
                .ok_or_else(|| ApiError::not_found(format!("no session {id}")))?,
        ),
        None => None,
    };
    let gaze = (req.gaze[0], req.gaze[1]);
    let png = tokio::task::spawn_blocking(move || -> visim_core::Result<Vec<u8>> {
        let frame = decode_image(&bytes)?;
        let out = match &session {
            // Holding the lock for the whole render serializes one session.
            Some(s) => render_frame(&frame, &profile, gaze, req.time, Some(&mut s.lock().unwrap()))?,
            None => render_frame(&frame, &profile, gaze, req.time, None)?,
        };
        encode_png(&out)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    Ok(([(header::CONTENT_TYPE, "image/png")], png).into_response())
}

async fn list_profiles(State(state): State<AppState>) -> Response {
    let mut names: Vec<String> = presets().into_iter().map(|p| p.name).collect();
    if let Ok(dir) = std::fs::read_dir(state.profile_dir.as_ref()) {
        for entry in dir.flatten() {
            let path = entry.path();
            if path.extension().is_some_and(|e| e == "json") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    names.push(stem.to_string());
                }
            }
        }
    }
    names.sort();
    names.dedup();
    json_response(StatusCode::OK, &json!({ "profiles": names }))
}

async fn get_profile(State(state): State<AppState>, Path(name): Path<String>) -> Result<Response, ApiError> {
    let p = state.stored_profile(&name)?;
    Ok(json_response(StatusCode::OK, &p.to_value()))
}

async fn put_profile(
    State(state): State<AppState>,
    Path(name): Path<String>,
    Json(doc): Json<Value>,
) -> Result<Response, ApiError> {
    if name.is_empty() || file_stem(&name) != name {
        return Err(ApiError::bad_request(
            "profile names may only contain ASCII letters, digits, `-` and `_`",
        ));
    }
    let (mut profile, warnings) = Profile::from_value_with_warnings(&doc)?;
    let report = validate(&profile.stack);
    if !report.is_ok() {
        return Err(Error::Validation(report).into());
    }
    for w in warnings {
        log::warn!("profile {name}: {w}");
    }
    profile.name = name.clone();
    std::fs::create_dir_all(state.profile_dir.as_ref()).map_err(Error::from)?;
    profile.save(state.profile_dir.join(format!("{name}.json")))?;
    Ok(json_response(StatusCode::OK, &profile.to_value()))
}

/// Serves on `127.0.0.1:port` until the process is stopped.
pub fn serve(port: u16, profile_dir: PathBuf) -> anyhow::Result<()> {
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let addr = SocketAddr::from(([127, 0, 0, 1], port));
        let listener = tokio::net::TcpListener::bind(addr).await?;
        log::info!("listening on http://{addr}, profiles in {}", profile_dir.display());
        eprintln!("visim service on http://{addr}");
        axum::serve(listener, router(AppState::new(profile_dir))).await?;
        Ok(())
    })
}
