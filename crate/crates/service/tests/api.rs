use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use copaint_core::affect::VaPoint;
use copaint_core::canvas::Raster;
use copaint_core::user_model::{load_profile, save_profile};
use copaint_service::api::{router, AppState};
use copaint_service::config::Config;
use copaint_service::engine::Engine;
use copaint_service::store::ProfileStore;
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> Router {
    let engine = Engine::new(Config {
        stroke_budget: 30,
        ..Config::default()
    })
    .unwrap();
    router(AppState::new(Arc::new(engine), Arc::new(ProfileStore::in_memory())))
}

async fn call(app: &Router, method: Method, uri: &str, body: Vec<u8>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri).body(Body::from(body)).unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    (status, to_bytes(res.into_body(), usize::MAX).await.unwrap().to_vec())
}

async fn call_json(app: &Router, method: Method, uri: &str, body: Value) -> (StatusCode, Value) {
    let (status, bytes) = call(app, method, uri, serde_json::to_vec(&body).unwrap()).await;
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

fn yellow_canvas() -> Vec<u8> {
    let mut r = Raster::blank(64, 48);
    for y in 0..48 {
        for x in 0..32 {
            r.set(x, y, [250, 220, 30]);
        }
    }
    r.to_png().unwrap()
}

#[tokio::test]
async fn health() {
    let (status, body) = call(&app(), Method::GET, "/healthz", vec![]).await;
    assert_eq!((status, body.as_slice()), (StatusCode::OK, b"ok".as_slice()));
}

#[tokio::test]
async fn full_loop_moves_the_rated_concept() {
    let app = app();
    let (status, created) = call_json(&app, Method::POST, "/sessions", json!({"profileIds": ["ana"]})).await;
    assert_eq!(status, StatusCode::CREATED);
    let sid = created["sessionId"].as_str().unwrap().to_string();
    assert_eq!(created["state"], "HumanTurn");

    let (status, _) = call(&app, Method::POST, &format!("/sessions/{sid}/turn"), vec![]).await;
    assert_eq!(status, StatusCode::BAD_REQUEST, "no canvas yet");

    let (status, _) = call(&app, Method::PUT, &format!("/sessions/{sid}/canvas"), yellow_canvas()).await;
    assert_eq!(status, StatusCode::OK);
    let (status, turn) = call_json(
        &app,
        Method::POST,
        &format!("/sessions/{sid}/turn"),
        json!({"declaredSymbols": ["nature/sun"]}),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{turn}");
    let concept = turn["decision"]["concept"].as_str().unwrap().to_string();
    assert_ne!(concept, "nature/sun");
    assert!(turn["strokePlan"]["strokes"].as_array().unwrap().iter().all(|s| {
        s["points"].as_array().unwrap().iter().all(|p| p[0].as_f64().unwrap() >= 32.0 - 1e-9)
    }));

    let (status, err) = call_json(&app, Method::POST, &format!("/sessions/{sid}/turn"), json!({})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["kind"], "InvalidTransition");

    let (_, before) = call(&app, Method::GET, "/profiles/ana", vec![]).await;
    let before = load_profile(&before).unwrap().effective_affect(&concept).unwrap().0;
    let (status, fb) = call_json(
        &app,
        Method::POST,
        &format!("/sessions/{sid}/feedback"),
        json!({"samValence": 1, "samArousal": 1}),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{fb}");
    assert_eq!(fb["state"], "HumanTurn");
    let (_, after) = call(&app, Method::GET, "/profiles/ana", vec![]).await;
    let after = load_profile(&after).unwrap().effective_affect(&concept).unwrap().0;
    let target = VaPoint::new(1.0, 1.0);
    assert!((after.distance(&target) - 0.5 * before.distance(&target)).abs() < 1e-9);

    let (status, _) = call_json(
        &app,
        Method::POST,
        &format!("/sessions/{sid}/feedback"),
        json!({"samValence": 1, "samArousal": 1}),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (_, closed) = call_json(&app, Method::POST, &format!("/sessions/{sid}/close"), json!({})).await;
    assert_eq!(closed["state"], "Closed");
}

#[tokio::test]
async fn upload_while_awaiting_feedback_skips() {
    let app = app();
    let (_, created) = call_json(&app, Method::POST, "/sessions", json!({"profileIds": ["bo"]})).await;
    let sid = created["sessionId"].as_str().unwrap().to_string();
    call(&app, Method::PUT, &format!("/sessions/{sid}/canvas"), yellow_canvas()).await;
    let (status, _) = call(&app, Method::POST, &format!("/sessions/{sid}/turn"), vec![]).await;
    assert_eq!(status, StatusCode::OK);
    let (_, profile_before) = call(&app, Method::GET, "/profiles/bo", vec![]).await;
    let (status, summary) = call(&app, Method::PUT, &format!("/sessions/{sid}/canvas"), yellow_canvas()).await;
    assert_eq!(status, StatusCode::OK);
    let summary: Value = serde_json::from_slice(&summary).unwrap();
    assert_eq!(summary["state"], "HumanTurn");
    assert_eq!(summary["turnCount"], 1);
    let (_, profile_after) = call(&app, Method::GET, "/profiles/bo", vec![]).await;
    assert_eq!(profile_before, profile_after);
}

#[tokio::test]
async fn profiles_and_disclosure() {
    let app = app();
    let (status, _) = call(&app, Method::GET, "/profiles/cy", vec![]).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let profile = copaint_core::user_model::demo_profile("cy");
    let (status, _) = call(&app, Method::PUT, "/profiles/cy", save_profile(&profile)).await;
    assert_eq!(status, StatusCode::OK);
    let (status, _) = call(&app, Method::PUT, "/profiles/other", save_profile(&profile)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (status, body) = call_json(
        &app,
        Method::POST,
        "/profiles/cy/disclosure",
        json!({"happy": ["balloons"], "elements": {"red": ["happy", "angry"]}}),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let (_, bytes) = call(&app, Method::GET, "/profiles/cy", vec![]).await;
    let stored = load_profile(&bytes).unwrap();
    assert_eq!(stored.effective_affect("object/balloon").unwrap().0, VaPoint::new(0.5, 0.5));
    let (status, _) = call_json(&app, Method::POST, "/profiles/cy/disclosure", json!({})).await;
    assert_eq!(status, StatusCode::OK);
    let (status, _) = call_json(&app, Method::POST, "/profiles/cy/disclosure", json!({"joyful": []})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call_json(&app, Method::POST, "/profiles/nobody/disclosure", json!({})).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn bad_requests() {
    let app = app();
    let (status, _) = call_json(&app, Method::POST, "/sessions", json!({"profileIds": []})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call_json(&app, Method::POST, "/sessions", json!({"profileIds": ["../x"]})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, Method::GET, "/sessions/s404", vec![]).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (_, created) = call_json(&app, Method::POST, "/sessions", json!({"profileIds": ["dee"]})).await;
    let sid = created["sessionId"].as_str().unwrap().to_string();
    let (status, _) = call(&app, Method::PUT, &format!("/sessions/{sid}/canvas"), b"not a png".to_vec()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call_json(
        &app,
        Method::POST,
        &format!("/sessions/{sid}/feedback"),
        json!({"samValence": 0, "samArousal": 3}),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}
