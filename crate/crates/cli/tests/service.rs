use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use base64::Engine;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use visim_cli::service::{router, AppState};
use visim_core::io::{decode_image, encode_png, to_rgb8};
use visim_core::profiles::canonical;
use visim_core::symptoms::{FlickeringStars, Hyperopia};
use visim_core::{Frame, Profile, SymptomStack};

fn b64(bytes: &[u8]) -> String {
    base64::engine::general_purpose::STANDARD.encode(bytes)
}

fn image() -> Vec<u8> {
    let f = Frame::from_fn(40, 30, |x, y| [x as f32 / 40.0, y as f32 / 30.0, 0.25]).unwrap();
    encode_png(&f).unwrap()
}

async fn call(app: &Router, req: Request<Body>) -> (StatusCode, Vec<u8>) {
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

async fn send(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(v) => req.header("content-type", "application/json").body(Body::from(v.to_string())),
        None => req.body(Body::empty()),
    };
    call(app, req.unwrap()).await
}

fn json_of(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap()
}

fn app() -> (tempfile::TempDir, Router) {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::new(dir.path().join("profiles")));
    (dir, app)
}

#[tokio::test]
async fn empty_stack_returns_the_input() {
    let (_dir, app) = app();
    let png = image();
    let profile = Profile::new("empty", SymptomStack::default(), 1);
    let body = json!({ "profile": profile.to_value(), "image": b64(&png) });
    let (code, out) = send(&app, "POST", "/render", Some(body)).await;
    assert_eq!(code, StatusCode::OK);
    let (a, b) = (decode_image(&png).unwrap(), decode_image(&out).unwrap());
    assert_eq!(to_rgb8(&a), to_rgb8(&b));
}

#[tokio::test]
async fn sessions_with_the_same_seed_render_identically() {
    let (_dir, app) = app();
    let profile = Profile::new(
        "stars",
        SymptomStack::default()
            .with(Hyperopia { cpd: 6.0 })
            .with(FlickeringStars::default()),
        5,
    );
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let (code, s) = send(&app, "POST", "/session", Some(json!({ "seed": 42 }))).await;
        assert_eq!(code, StatusCode::OK);
        let s = json_of(&s);
        assert_eq!(s["seed"], 42);
        let body = json!({
            "profile": profile.to_value(),
            "image": b64(&image()),
            "gaze": [0.4, 0.6],
            "time": 0.5,
            "session": s["id"],
        });
        let (code, out) = send(&app, "POST", "/render", Some(body)).await;
        assert_eq!(code, StatusCode::OK, "{}", String::from_utf8_lossy(&out));
        outputs.push(out);
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[tokio::test]
async fn session_without_seed_gets_one() {
    let (_dir, app) = app();
    let (code, a) = send(&app, "POST", "/session", None).await;
    assert_eq!(code, StatusCode::OK);
    let (_, b) = send(&app, "POST", "/session", None).await;
    let (a, b) = (json_of(&a), json_of(&b));
    assert!(a["seed"].is_u64());
    assert_ne!(a["id"], b["id"]);
}

#[tokio::test]
async fn unknown_session_and_profile_are_not_found() {
    let (_dir, app) = app();
    let body = json!({ "profile_name": "P1", "image": b64(&image()), "session": 999 });
    let (code, _) = send(&app, "POST", "/render", Some(body)).await;
    assert_eq!(code, StatusCode::NOT_FOUND);
    let body = json!({ "profile_name": "no-such-profile", "image": b64(&image()) });
    let (code, _) = send(&app, "POST", "/render", Some(body)).await;
    assert_eq!(code, StatusCode::NOT_FOUND);
    let (code, _) = send(&app, "GET", "/profiles/no-such-profile", None).await;
    assert_eq!(code, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn oversized_image_is_rejected_before_decoding() {
    let (_dir, app) = app();
    // Header only: the size check must fire before the pixel data is read.
    let body = json!({ "profile_name": "P1", "image": b64(b"P6\n6000 6000\n255\n") });
    let (code, _) = send(&app, "POST", "/render", Some(body)).await;
    assert_eq!(code, StatusCode::PAYLOAD_TOO_LARGE);
}

#[tokio::test]
async fn out_of_range_parameters_return_a_report() {
    let (_dir, app) = app();
    let profile = Profile::new("bad", SymptomStack::default().with(Hyperopia { cpd: 100.0 }), 1);
    let body = json!({ "profile": profile.to_value(), "image": b64(&image()) });
    let (code, out) = send(&app, "POST", "/render", Some(body)).await;
    assert_eq!(code, StatusCode::BAD_REQUEST);
    assert!(json_of(&out).get("report").is_some());

    let (code, out) = send(&app, "PUT", "/profiles/bad", Some(profile.to_value())).await;
    assert_eq!(code, StatusCode::BAD_REQUEST);
    assert!(json_of(&out).get("report").is_some());
}

#[tokio::test]
async fn profiles_round_trip_through_put_and_get() {
    let (_dir, app) = app();
    let profile = Profile::new("mine", SymptomStack::default().with(Hyperopia { cpd: 3.0 }), 9);
    let (code, _) = send(&app, "PUT", "/profiles/bad%20name", Some(profile.to_value())).await;
    assert_eq!(code, StatusCode::BAD_REQUEST);

    let (code, _) = send(&app, "PUT", "/profiles/mine", Some(profile.to_value())).await;
    assert_eq!(code, StatusCode::OK);
    let (code, got) = send(&app, "GET", "/profiles/mine", None).await;
    assert_eq!(code, StatusCode::OK);
    assert_eq!(canonical::to_string(&json_of(&got)), canonical::to_string(&profile.to_value()));

    let (_, list) = send(&app, "GET", "/profiles", None).await;
    let names: Vec<String> = serde_json::from_value(json_of(&list)["profiles"].clone()).unwrap();
    assert!(names.contains(&"mine".to_string()));
    assert!(names.contains(&"P1".to_string()));

    let body = json!({ "profile_name": "mine", "image": b64(&image()) });
    let (code, _) = send(&app, "POST", "/render", Some(body)).await;
    assert_eq!(code, StatusCode::OK);
}

#[tokio::test]
async fn symptoms_lists_every_type() {
    let (_dir, app) = app();
    let (code, out) = send(&app, "GET", "/symptoms", None).await;
    assert_eq!(code, StatusCode::OK);
    assert_eq!(json_of(&out)["symptoms"].as_array().unwrap().len(), 18);
}
