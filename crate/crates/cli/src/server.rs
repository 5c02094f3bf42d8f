//! The HTTP JSON service. Every handler is a pure function of its request.

use std::net::SocketAddr;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::Query;
use axum::http::{HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use krk_core::{classify_all, BoardSpec, Strategy, Variant};
use serde::{Deserialize, Serialize};
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

use crate::wire::{analyze, play, ApiError, PlayRequest, Reason, WirePosition};

/// Largest board `/classify` will sweep on request.
pub const MAX_CLASSIFY_N: i32 = 16;

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status()).unwrap_or(StatusCode::BAD_REQUEST);
        (status, Json(self)).into_response()
    }
}

fn rejected(e: impl std::fmt::Display) -> ApiError {
    ApiError::new(Reason::BadRequest, e.to_string())
}

#[derive(Serialize)]
struct Health {
    status: &'static str,
    version: &'static str,
}

async fn health() -> Json<Health> {
    Json(Health {
        status: "ok",
        version: env!("CARGO_PKG_VERSION"),
    })
}

async fn analyze_handler(body: Result<Json<WirePosition>, JsonRejection>) -> Response {
    let result = body.map_err(rejected).and_then(|Json(req)| analyze(&req));
    match result {
        Ok(report) => Json(report).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn play_handler(body: Result<Json<PlayRequest>, JsonRejection>) -> Response {
    let result = body.map_err(rejected).and_then(|Json(req)| play(&req));
    match result {
        Ok(resp) => Json(resp).into_response(),
        Err(e) => e.into_response(),
    }
}

#[derive(Deserialize)]
struct ClassifyQuery {
    n: i32,
    variant: Option<Variant>,
}

async fn classify_handler(query: Result<Query<ClassifyQuery>, QueryRejection>) -> Response {
    let Query(q) = match query {
        Ok(q) => q,
        Err(e) => return rejected(e).into_response(),
    };
    if q.n > MAX_CLASSIFY_N {
        let msg = format!("n = {} is above the service limit of {MAX_CLASSIFY_N}", q.n);
        return ApiError::new(Reason::TooLarge, msg).into_response();
    }
    let spec = match BoardSpec::new(q.n, q.variant.unwrap_or(Variant::Generalized)) {
        Ok(s) => s,
        Err(e) => return rejected(e).into_response(),
    };
    // whole-board sweeps are CPU bound; keep them off the async workers
    match tokio::task::spawn_blocking(move || classify_all(&Strategy::new(spec))).await {
        Ok(h) => Json(h).into_response(),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response(),
    }
}

/// CORS for the web UI: `origin = None` allows any origin.
pub fn cors(origin: Option<&str>) -> CorsLayer {
    let layer = CorsLayer::new()
        .allow_methods([Method::GET, Method::POST])
        .allow_headers(Any);
    match origin.and_then(|o| HeaderValue::from_str(o).ok()) {
        Some(o) => layer.allow_origin(AllowOrigin::exact(o)),
        None => layer.allow_origin(Any),
    }
}

pub fn router(origin: Option<&str>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/analyze", post(analyze_handler))
        .route("/play", post(play_handler))
        .route("/classify", get(classify_handler))
        .layer(cors(origin))
}

pub async fn serve(addr: SocketAddr, origin: Option<&str>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(origin)).await
}

#[cfg(test)]
mod tests {
    use super::*;
    use axum::body::{to_bytes, Body};
    use axum::http::Request;
    use serde_json::{json, Value};
    use tower::ServiceExt;

    async fn call(method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
        let req = Request::builder()
            .method(method)
            .uri(uri)
            .header("content-type", "application/json");
        let req = req
            .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
            .unwrap();
        let resp = router(None).oneshot(req).await.unwrap();
        let status = resp.status();
        let bytes = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
        (
            status,
            serde_json::from_slice(&bytes).unwrap_or(Value::Null),
        )
    }

    #[tokio::test]
    async fn health_is_ok() {
        let (status, body) = call("GET", "/health", None).await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(body["status"], "ok");
    }

    #[tokio::test]
    async fn analyze_classifies_mate_in_one() {
        let pos = json!({"n":8,"wk":[2,3],"bk":[0,3],"wr":[5,6],"whiteToMove":true});
        let (status, body) = call("POST", "/analyze", Some(pos.clone())).await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(body["classification"], "ImmediateMate");
        assert_eq!(body["strategyMove"]["to"]["wr"], json!([0, 6]));
        // stateless: the same request gives the same bytes
        let (_, again) = call("POST", "/analyze", Some(pos)).await;
        assert_eq!(body, again);
    }

    #[tokio::test]
    async fn bad_requests_are_400_and_captured_rook_is_422() {
        let (status, body) = call("POST", "/analyze", Some(json!({"n":8,"wk":[1,1]}))).await;
        assert_eq!(status, StatusCode::BAD_REQUEST);
        assert_eq!(body["reason"], "bad_request");
        let illegal =
            json!({"n":8,"wk":[3,2],"bk":[2,6],"wr":[5,4],"whiteToMove":false,"blackMove":[5,5]});
        let (status, body) = call("POST", "/play", Some(illegal)).await;
        assert_eq!(status, StatusCode::BAD_REQUEST);
        assert_eq!(body["reason"], "illegal_move");
        let capture =
            json!({"n":8,"wk":[0,0],"bk":[4,4],"wr":[5,5],"whiteToMove":false,"blackMove":[5,5]});
        let (status, body) = call("POST", "/play", Some(capture)).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
        assert_eq!(body["reason"], "rook_captured");
    }

    #[tokio::test]
    async fn classify_returns_the_histogram() {
        let (status, body) = call("GET", "/classify?n=4", None).await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(body["total"], 1312);
        assert_eq!(body["unclassified"], 0);
        let sum: u64 = body["counts"]
            .as_object()
            .unwrap()
            .values()
            .map(|v| v.as_u64().unwrap())
            .sum();
        assert_eq!(sum, 1312);
        assert_eq!(
            call("GET", "/classify?n=99", None).await.0,
            StatusCode::BAD_REQUEST
        );
        assert_eq!(
            call("GET", "/classify?n=five", None).await.0,
            StatusCode::BAD_REQUEST
        );
    }

    #[tokio::test]
    async fn cors_headers_are_sent() {
        let req = Request::builder()
            .method("OPTIONS")
            .uri("/analyze")
            .header("origin", "http://localhost:5173")
            .header("access-control-request-method", "POST")
            .body(Body::empty())
            .unwrap();
        let resp = router(None).oneshot(req).await.unwrap();
        assert!(resp.headers().contains_key("access-control-allow-origin"));
    }

    #[tokio::test]
    async fn scripted_game_ends_in_mate_within_65_plies() {
        let mut pos = json!({"n":8,"wk":[3,2],"bk":[2,6],"wr":[5,4],"whiteToMove":true});
        let mut plies = 0;
        loop {
            let (status, body) = call("POST", "/play", Some(pos.clone())).await;
            assert_eq!(status, StatusCode::OK, "{body}");
            plies += 1;
            assert_ne!(body["strategyReply"]["to"]["wr"], Value::Null);
            if body["gameStatus"] == "checkmate" {
                break;
            }
            assert_eq!(body["gameStatus"], "ongoing");
            // black always takes the first listed legal move
            let reply = body["strategyReply"]["to"].clone();
            let (_, a) = call("POST", "/analyze", Some(reply.clone())).await;
            let to = a["legalBlackMoves"][0].clone();
            let mut req = reply;
            req["blackMove"] = to;
            pos = req;
            plies += 1;
            assert!(plies < 65, "no mate within 65 plies");
        }
        assert!(plies <= 65);
    }
}
