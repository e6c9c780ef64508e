use std::sync::atomic::Ordering;
use std::time::Duration;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use qsim_core::{builtin_circuit, CircuitJson};
use qsim_service::{router, router_with_state, AppState};

async fn call(req: Request<Body>) -> (StatusCode, axum::http::HeaderMap, Vec<u8>) {
    let resp = router().oneshot(req).await.unwrap();
    let status = resp.status();
    let headers = resp.headers().clone();
    let body = resp
        .into_body()
        .collect()
        .await
        .unwrap()
        .to_bytes()
        .to_vec();
    (status, headers, body)
}

fn post(uri: &str, body: impl Into<String>) -> Request<Body> {
    Request::post(uri)
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(body.into()))
        .unwrap()
}

fn circuit_json(name: &str) -> Value {
    serde_json::to_value(CircuitJson::from(&builtin_circuit(name).unwrap())).unwrap()
}

async fn simulate(body: Value) -> (StatusCode, Value) {
    let (status, _, bytes) = call(post("/api/v1/simulate", body.to_string())).await;
    (status, serde_json::from_slice(&bytes).unwrap())
}

/// `(event name, data)` pairs of a complete SSE body.
fn parse_sse(text: &str) -> Vec<(String, Value)> {
    text.split("\n\n")
        .filter_map(|block| {
            let mut name = None;
            let mut data = None;
            for line in block.lines() {
                if let Some(v) = line.strip_prefix("event:") {
                    name = Some(v.trim().to_string());
                } else if let Some(v) = line.strip_prefix("data:") {
                    data = Some(serde_json::from_str(v.trim()).unwrap());
                }
            }
            Some((name?, data?))
        })
        .collect()
}

#[tokio::test]
async fn gate_catalog_is_complete_and_cacheable() {
    let (status, headers, body) =
        call(Request::get("/api/v1/gates").body(Body::empty()).unwrap()).await;
    assert_eq!(status, StatusCode::OK);
    let gates: Vec<Value> = serde_json::from_slice(&body).unwrap();
    assert_eq!(gates.len(), 20);
    let u3 = gates.iter().find(|g| g["name"] == "U3").unwrap();
    assert_eq!(u3["params"], json!(["theta", "phi", "lambda"]));
    let etag = headers[header::ETAG].to_str().unwrap().to_string();

    let (_, again, body2) = call(Request::get("/api/v1/gates").body(Body::empty()).unwrap()).await;
    assert_eq!(body, body2);
    assert_eq!(again[header::ETAG], etag.as_str());

    let cached = Request::get("/api/v1/gates")
        .header(header::IF_NONE_MATCH, &etag)
        .body(Body::empty())
        .unwrap();
    let (status, _, body) = call(cached).await;
    assert_eq!(status, StatusCode::NOT_MODIFIED);
    assert!(body.is_empty());
}

#[tokio::test]
async fn deutsch_jozsa_probabilities() {
    let (status, v) = simulate(json!({"circuit": circuit_json("dj_balanced")})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["probabilities"]["1111"].as_f64(), Some(1.0));
    assert_eq!(v["heatmap"].as_array().unwrap().len(), 32);
    assert!(v.get("density_noisy").is_none());
}

#[tokio::test]
async fn noisy_full_adder_returns_both_densities() {
    let body = json!({
        "circuit": circuit_json("full_adder"),
        "noise": {"p": 0.05, "mode": "overshoot"},
        "include_trace": true
    });
    let (status, v) = simulate(body).await;
    assert_eq!(status, StatusCode::OK);
    let noisy = &v["density_noisy"];
    let clean = &v["density_noiseless"];
    assert!((noisy["trace"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!(noisy["purity"].as_f64().unwrap() < clean["purity"].as_f64().unwrap());
    assert_eq!(v["trace"].as_array().unwrap().len(), 7);
    assert_eq!(v["bloch_trace"].as_array().unwrap().len(), 7);
}

#[tokio::test]
async fn vector_mode_has_no_heatmap() {
    let (status, v) =
        simulate(json!({"circuit": circuit_json("grover3_110"), "mode": "vector"})).await;
    assert_eq!(status, StatusCode::OK);
    assert!(v.get("heatmap").is_none());
    assert!((v["probabilities"]["110"].as_f64().unwrap() - 0.9453125).abs() < 1e-9);
}

#[tokio::test]
async fn oversized_circuit_is_rejected_with_413() {
    let grid: Vec<Value> = (0..30).map(|_| json!([{"op": "H"}])).collect();
    let circuit = json!({"format_version": 1, "qubits": 30, "stages": 1, "init": "0".repeat(30), "grid": grid});
    let (status, v) = simulate(json!({"circuit": circuit, "mode": "vector"})).await;
    assert_eq!(status, StatusCode::PAYLOAD_TOO_LARGE);
    assert_eq!(v["error"]["kind"], "resource_limit");
    let (status, _) =
        simulate(json!({"circuit": circuit_json("full_adder"), "noise": {"p": 0.1}})).await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn semantic_errors_carry_coordinates() {
    let circuit = json!({
        "format_version": 1, "qubits": 2, "stages": 2, "init": "00",
        "grid": [[{"op": "H"}, {"op": "C"}], [{"op": "X"}, {"op": "I"}]]
    });
    let (status, v) = simulate(json!({"circuit": circuit})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"]["row"], 0);
    assert_eq!(v["error"]["column"], 1);
}

#[tokio::test]
async fn schema_errors_are_400() {
    let (status, _, _) = call(post("/api/v1/simulate", "{not json")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, v) = simulate(json!({"circuit": circuit_json("dj_balanced"), "bogus": 1})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(v["error"]["message"].as_str().unwrap().contains("bogus"));
    let mut ragged = circuit_json("dj_balanced");
    ragged["grid"][0].as_array_mut().unwrap().pop();
    let (status, _) = simulate(json!({"circuit": ragged})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, v) =
        simulate(json!({"circuit": circuit_json("dj_balanced"), "noise": {"p": 9.9}})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(v["error"]["message"]
        .as_str()
        .unwrap()
        .contains("1.0009775"));
}

#[tokio::test]
async fn identical_requests_give_identical_bodies() {
    let body = json!({"circuit": circuit_json("full_adder"), "noise": {"p": 0.2, "mode": "stochastic", "seed": 9}});
    let a = call(post("/api/v1/simulate", body.to_string()));
    let b = call(post("/api/v1/simulate", body.to_string()));
    let (a, b) = tokio::join!(a, b);
    assert_eq!(a.2, b.2);
}

#[tokio::test]
async fn vqe_stream_solves_a_tiny_problem() {
    let body = json!({"target": 9, "bits_p": 2, "bits_q": 2, "layers": 1, "seed": 0});
    let (status, headers, bytes) = call(post("/api/v1/vqe/factor", body.to_string())).await;
    assert_eq!(status, StatusCode::OK);
    assert!(headers[header::CONTENT_TYPE]
        .to_str()
        .unwrap()
        .starts_with("text/event-stream"));
    let events = parse_sse(std::str::from_utf8(&bytes).unwrap());
    let (last, iterations) = events.split_last().unwrap();
    assert_eq!(last.0, "result");
    assert_eq!(last.1["recovered_factors"], json!([3, 3]));
    assert!(last.1["converged_at"].is_u64());
    assert!(!iterations.is_empty());
    for (i, (name, data)) in iterations.iter().enumerate() {
        assert_eq!(name, "iteration");
        assert_eq!(data["iter"], i);
        assert!(data["top_states"][0]["bitstring"].is_string());
    }
}

#[tokio::test]
async fn vqe_rejects_bad_configs() {
    let (status, _, body) = call(post(
        "/api/v1/vqe/factor",
        r#"{"target": 90, "bits_p": 4, "bits_q": 3}"#,
    ))
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let v: Value = serde_json::from_slice(&body).unwrap();
    assert!(v["error"]["message"].as_str().unwrap().contains("odd"));
    let (status, _, body) = call(post(
        "/api/v1/vqe/factor",
        r#"{"target": 91, "bits_p": "x"}"#,
    ))
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let v: Value = serde_json::from_slice(&body).unwrap();
    assert!(v["error"]["message"].as_str().unwrap().contains("bits_p"));
}

#[tokio::test]
async fn dropping_the_stream_aborts_the_run() {
    let state = AppState::default();
    let app = router_with_state(state.clone());
    // unreachable threshold and a huge budget: only a disconnect ends this run
    let body = json!({"target": 91, "bits_p": 4, "bits_q": 3, "max_iters": 1000000, "convergence_amplitude": 1.0});
    let resp = app
        .oneshot(post("/api/v1/vqe/factor", body.to_string()))
        .await
        .unwrap();
    let mut stream = resp.into_body();
    let first = stream.frame().await.unwrap().unwrap();
    assert!(first.data_ref().is_some());
    assert_eq!(state.active_vqe_runs.load(Ordering::SeqCst), 1);
    drop(stream);
    for _ in 0..200 {
        if state.active_vqe_runs.load(Ordering::SeqCst) == 0 {
            return;
        }
        tokio::time::sleep(Duration::from_millis(25)).await;
    }
    panic!("run kept going after the client disconnected");
}

#[tokio::test]
async fn openapi_document_lists_the_routes() {
    let (status, headers, body) =
        call(Request::get("/api/v1/spec").body(Body::empty()).unwrap()).await;
    assert_eq!(status, StatusCode::OK);
    assert!(headers[header::CONTENT_TYPE]
        .to_str()
        .unwrap()
        .contains("json"));
    let v: Value = serde_json::from_slice(&body).unwrap();
    for path in ["/gates", "/simulate", "/vqe/factor", "/spec"] {
        assert!(v["paths"].get(path).is_some(), "{path}");
    }
}

#[tokio::test]
async fn cors_preflight_is_answered() {
    let req = Request::builder()
        .method("OPTIONS")
        .uri("/api/v1/simulate")
        .header(header::ORIGIN, "http://localhost:5173")
        .header(header::ACCESS_CONTROL_REQUEST_METHOD, "POST")
        .body(Body::empty())
        .unwrap();
    let (status, headers, _) = call(req).await;
    assert!(status.is_success());
    assert_eq!(headers[header::ACCESS_CONTROL_ALLOW_ORIGIN], "*");
}
