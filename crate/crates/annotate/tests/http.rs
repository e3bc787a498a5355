mod common;

use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, HeaderValue, Request, StatusCode};
use axum::Router;
use depthedge::io;
use depthedge_annotate::{router, ProposalSource, ServerConfig, Session};
use serde_json::{json, Value};
use tower::ServiceExt;

fn app(root: &std::path::Path) -> (Router, Arc<Session>) {
    let s = Arc::new(Session::init(root, ProposalSource::Panoptic).unwrap());
    (router(Arc::clone(&s), ServerConfig::default().allowed_origins()), s)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header(header::CONTENT_TYPE, "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = axum::body::to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    (status, bytes.to_vec())
}

async fn call_json(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (s, b) = call(app, method, uri, body).await;
    (s, serde_json::from_slice(&b).unwrap())
}

#[tokio::test]
async fn scripted_session() {
    let dir = tempfile::tempdir().unwrap();
    common::write_dataset(dir.path());
    let (app, _) = app(dir.path());

    let (st, items) = call_json(&app, "GET", "/items", None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(items.as_array().unwrap().len(), 2);
    assert_eq!(items[0]["id"], "a");
    assert_eq!(items[0]["status"], "todo");
    assert_eq!(items[1]["provenance"], "edge_map_file");

    let (st, item) = call_json(&app, "GET", "/items/a", None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(item["depth_url"], "/items/a/depth");
    assert_eq!((item["height"].as_u64(), item["width"].as_u64()), (Some(8), Some(10)));

    let (st, rgb) = call(&app, "GET", "/items/a/image", None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(rgb, std::fs::read(dir.path().join("a.png")).unwrap());

    let (st, pfm) = call(&app, "GET", "/items/a/depth", None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(io::read_pfm(&pfm).unwrap(), common::step_depth());
    let (st, _) = call(&app, "GET", "/items/b/depth", None).await;
    assert_eq!(st, StatusCode::NOT_FOUND);

    let (st, body) = call_json(
        &app,
        "POST",
        "/items/b/edits",
        Some(json!({"op": "add_polyline", "points": [[0, 0], [0, 3]]})),
    )
    .await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(body["seq"], 1);
    assert_eq!(body["status"], "in_progress");
    let edges: Vec<(usize, usize)> = serde_json::from_value(body["edges"].clone()).unwrap();
    for c in 0..=3 {
        assert!(edges.contains(&(0, c)));
    }

    let (st, png) = call(&app, "GET", "/items/b/edges", None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(io::read_edges_png8(&png).unwrap().pixels(), edges);

    let (st, body) = call_json(
        &app,
        "POST",
        "/items/b/edits",
        Some(json!({"op": "add_polyline", "points": [[0, 0], [0, 30]]})),
    )
    .await;
    assert_eq!(st, StatusCode::BAD_REQUEST);
    assert!(body["error"].as_str().unwrap().contains("outside"));

    let (st, probe) =
        call_json(&app, "POST", "/items/a/probe", Some(json!({"p1": [2, 4], "p2": [2, 5]}))).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(probe, json!({"d1": 10.0, "d2": 15.0, "diff": 5.0, "exceeds_4m": true}));

    let (st, _) = call_json(&app, "POST", "/export", Some(json!({}))).await;
    assert_eq!(st, StatusCode::CONFLICT);

    let (st, summary) = call_json(&app, "POST", "/items/b/status", Some(json!({"status": "done"}))).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(summary["status"], "done");

    let (st, export) = call_json(&app, "POST", "/export", None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(export["ids"], json!(["b"]));
    let exported = io::load_edges(&dir.path().join("export/b.png")).unwrap();
    assert_eq!(exported.pixels(), edges);

    let (st, _) = call_json(&app, "GET", "/items/nope", None).await;
    assert_eq!(st, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn concurrent_writer_gets_conflict() {
    let dir = tempfile::tempdir().unwrap();
    common::write_dataset(dir.path());
    let (app, session) = app(dir.path());
    let guard = session.writer("a").unwrap();
    let edit = json!({"op": "erase_polyline", "points": [[0, 0]], "brush_radius": 1});
    let (st, _) = call_json(&app, "POST", "/items/a/edits", Some(edit.clone())).await;
    assert_eq!(st, StatusCode::CONFLICT);
    drop(guard);
    let (st, _) = call_json(&app, "POST", "/items/a/edits", Some(edit)).await;
    assert_eq!(st, StatusCode::OK);
}

#[tokio::test]
async fn cors_only_for_local_ui() {
    let dir = tempfile::tempdir().unwrap();
    common::write_dataset(dir.path());
    let (app, _) = app(dir.path());
    let origin_header = |origin: &'static str| {
        let app = app.clone();
        async move {
            let req = Request::builder()
                .uri("/items")
                .header(header::ORIGIN, origin)
                .body(Body::empty())
                .unwrap();
            app.oneshot(req).await.unwrap().headers().get(header::ACCESS_CONTROL_ALLOW_ORIGIN).cloned()
        }
    };
    assert_eq!(
        origin_header("http://localhost:8707").await,
        Some(HeaderValue::from_static("http://localhost:8707"))
    );
    assert_eq!(origin_header("http://evil.example").await, None);
}
