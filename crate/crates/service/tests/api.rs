use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use hems_core::io::{parse_scenario, report_json};
use hems_core::run_scheduled;
use hems_service::{router, AppState};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn calibration_text() -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios/case1_dynamic_pil_flat_tariff.json");
    std::fs::read_to_string(path).unwrap()
}

/// Calibration scenario without its EV request, so a live one can be entered.
fn without_ev() -> String {
    let mut v: Value = serde_json::from_str(&calibration_text()).unwrap();
    v["requests"]
        .as_array_mut()
        .unwrap()
        .retain(|r| r["appliance"] != "ev_charging");
    v.to_string()
}

async fn call(
    app: &Router,
    method: Method,
    uri: &str,
    body: Option<String>,
) -> (StatusCode, String) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map(Body::from).unwrap_or_else(Body::empty))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn call_json(
    app: &Router,
    method: Method,
    uri: &str,
    body: Option<String>,
) -> (StatusCode, Value) {
    let (status, text) = call(app, method, uri, body).await;
    (status, serde_json::from_str(&text).unwrap_or(Value::Null))
}

async fn create(app: &Router, scenario: String) -> String {
    let (status, v) = call_json(app, Method::POST, "/sessions", Some(scenario)).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    v["id"].as_str().unwrap().to_string()
}

async fn advance(app: &Router, id: &str, to_k: u16) -> (StatusCode, Value) {
    call_json(
        app,
        Method::POST,
        &format!("/sessions/{id}/advance"),
        Some(json!({"to_k": to_k}).to_string()),
    )
    .await
}

async fn submit(app: &Router, id: &str, body: Value) -> (StatusCode, Value) {
    call_json(
        app,
        Method::POST,
        &format!("/sessions/{id}/requests"),
        Some(body.to_string()),
    )
    .await
}

#[tokio::test]
async fn create_returns_fresh_session() {
    let app = router(AppState::new());
    let (status, v) = call_json(&app, Method::POST, "/sessions", Some(calibration_text())).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(v["state"]["current_k"], 0);
    assert_eq!(v["state"]["status"], "active");
    assert_eq!(v["state"]["appliances"].as_array().unwrap().len(), 13);
    assert_eq!(v["state"]["intervals"].as_array().unwrap().len(), 0);
}

#[tokio::test]
async fn invalid_scenario_lists_fields() {
    let app = router(AppState::new());
    let bad = calibration_text().replacen("\"r_min\": 120", "\"r_min\": 7", 1);
    assert_ne!(bad, calibration_text());
    let (status, v) = call_json(&app, Method::POST, "/sessions", Some(bad)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let paths: Vec<&str> = v["issues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| i["path"].as_str().unwrap())
        .collect();
    assert_eq!(paths.len(), 1);
    assert!(
        paths[0].starts_with("requests[") && paths[0].ends_with("].r_min"),
        "{paths:?}"
    );

    let (status, _) = call_json(&app, Method::POST, "/sessions", Some("{oops".into())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn sessions_are_independent() {
    let app = router(AppState::new());
    let a = create(&app, calibration_text()).await;
    let b = create(&app, calibration_text()).await;
    assert_ne!(a, b);
    advance(&app, &a, 50).await;
    let (_, va) = call_json(&app, Method::GET, &format!("/sessions/{a}"), None).await;
    let (_, vb) = call_json(&app, Method::GET, &format!("/sessions/{b}"), None).await;
    assert_eq!(va["current_k"], 50);
    assert_eq!(vb["current_k"], 0);
}

#[tokio::test]
async fn unknown_session_is_not_found() {
    let app = router(AppState::new());
    for (method, uri) in [
        (Method::GET, "/sessions/nope"),
        (Method::GET, "/sessions/nope/export"),
        (Method::POST, "/sessions/nope/advance"),
    ] {
        let body = (method == Method::POST).then(|| json!({"to_k": 3}).to_string());
        let (status, _) = call(&app, method, uri, body).await;
        assert_eq!(status, StatusCode::NOT_FOUND, "{uri}");
    }
}

#[tokio::test]
async fn stepwise_advance_matches_batch_run() {
    let app = router(AppState::new());
    let stepped = create(&app, calibration_text()).await;
    let whole = create(&app, calibration_text()).await;
    for to_k in (12..=288).step_by(12) {
        let (status, v) = advance(&app, &stepped, to_k).await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(v["intervals"].as_array().unwrap().len(), usize::from(to_k));
    }
    advance(&app, &whole, 288).await;
    let (_, a) = call_json(&app, Method::GET, &format!("/sessions/{stepped}"), None).await;
    let (_, b) = call_json(&app, Method::GET, &format!("/sessions/{whole}"), None).await;
    assert_eq!(a["status"], "finished");
    assert_eq!(a["intervals"], b["intervals"]);
    assert_eq!(a["appliances"], b["appliances"]);

    let (status, exported) = call(
        &app,
        Method::GET,
        &format!("/sessions/{stepped}/export"),
        None,
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    let scenario: hems_core::Scenario = parse_scenario(&calibration_text()).unwrap();
    let batch = run_scheduled(&scenario).unwrap();
    assert_eq!(exported, report_json(&batch, None));
}

#[tokio::test]
async fn invalid_advances_conflict() {
    let app = router(AppState::new());
    let id = create(&app, calibration_text()).await;
    let (status, _) = call_json(&app, Method::GET, &format!("/sessions/{id}/export"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    advance(&app, &id, 20).await;
    assert_eq!(advance(&app, &id, 20).await.0, StatusCode::CONFLICT);
    assert_eq!(advance(&app, &id, 10).await.0, StatusCode::CONFLICT);
    assert_eq!(advance(&app, &id, 289).await.0, StatusCode::CONFLICT);
    let (_, v) = call_json(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(v["current_k"], 20);
    assert_eq!(advance(&app, &id, 288).await.0, StatusCode::OK);
    assert_eq!(advance(&app, &id, 288).await.0, StatusCode::CONFLICT);

    let (status, _) = call(
        &app,
        Method::POST,
        &format!("/sessions/{id}/advance"),
        Some("{\"to_k\": \"x\"}".into()),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn live_ev_request_lands_in_window() {
    let app = router(AppState::new());
    let id = create(&app, without_ev()).await;
    advance(&app, &id, 4).await;
    let (status, v) = submit(
        &app,
        &id,
        json!({"appliance": "ev_charging", "s": "00:45", "f": "06:00", "r_min": 120}),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_eq!(v["at_k"], 5);
    let view = v["state"]["requests"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["appliance"] == "ev_charging")
        .cloned();
    assert!(view.is_some(), "pending request is listed");
    let (_, v) = advance(&app, &id, 288).await;
    let ev = v["appliances"]
        .as_array()
        .unwrap()
        .iter()
        .find(|a| a["name"] == "ev_charging")
        .unwrap();
    let on: Vec<usize> = ev["on"]
        .as_array()
        .unwrap()
        .iter()
        .enumerate()
        .filter(|(_, b)| b.as_bool().unwrap())
        .map(|(i, _)| i + 1)
        .collect();
    assert_eq!(on.len(), 24);
    assert!(on.iter().all(|&k| (10..=72).contains(&k)), "{on:?}");
}

#[tokio::test]
async fn submission_boundary_and_rejections() {
    let app = router(AppState::new());
    let id = create(&app, without_ev()).await;
    advance(&app, &id, 83).await;
    // s = 07:00 is interval 85; entered during interval 84
    let (status, v) = submit(
        &app,
        &id,
        json!({"appliance": "ev_charging", "s": "07:00", "f": "09:00", "r_min": 60}),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{v}");

    let other = create(&app, without_ev()).await;
    advance(&app, &other, 85).await;
    let (status, v) = submit(
        &app,
        &other,
        json!({"appliance": "ev_charging", "s": "07:00", "f": "09:00", "r_min": 60}),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["accepted"], false);
    assert_eq!(v["kind"], "late");

    let (status, v) = submit(
        &app,
        &other,
        json!({"appliance": "ev_charging", "s": "12:00", "f": "12:30", "r_min": 60}),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["kind"], "invalid");
    assert!(!v["reason"].as_str().unwrap().is_empty());

    let (status, v) = submit(
        &app,
        &other,
        json!({"appliance": "kettle", "s": "12:00", "f": "13:00", "r_min": 30}),
    )
    .await;
    assert_eq!(
        (status, v["kind"].as_str()),
        (StatusCode::UNPROCESSABLE_ENTITY, Some("unknown_appliance"))
    );

    let (status, v) = submit(
        &app,
        &other,
        json!({"appliance": "ev_charging", "s": "12:00", "f": "13:00", "r_min": 7}),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["issues"][0]["path"], "r_min");
}

#[tokio::test]
async fn snapshot_exposes_live_priorities() {
    let app = router(AppState::new());
    let id = create(&app, calibration_text()).await;
    let (_, v) = advance(&app, &id, 90).await;
    let pump = v["requests"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["appliance"] == "water_pump")
        .unwrap();
    assert!(pump["dynamic_priority"].as_f64().unwrap() > 0.0);
    assert!(pump["cpr"].is_number() || pump["cpr"].is_null());
    let rows = v["intervals"].as_array().unwrap();
    assert!(rows
        .iter()
        .all(|r| r["room_c"].is_number() && r["pil_eff_kw"].is_number()));
    assert!(v["bill"]["total_cost"].as_f64().unwrap() > 0.0);
}
