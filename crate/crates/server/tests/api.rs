use std::path::Path;
use std::sync::{Arc, OnceLock};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use moviesim_core::corpus::ArtifactStore;
use moviesim_core::pipeline::{load_config, Pipeline};
use moviesim_server::{router, Catalog, ServerError};
use serde_json::Value;
use tower::ServiceExt;

struct Fixture {
    _dir: tempfile::TempDir,
    store: ArtifactStore,
    catalog: Arc<Catalog>,
}

fn fixture() -> &'static Fixture {
    static CELL: OnceLock<Fixture> = OnceLock::new();
    CELL.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/minicorpus");
        let mut cfg = load_config(&corpus.join("pipeline.json")).unwrap();
        cfg.artifacts = dir.path().to_path_buf();
        Pipeline::new(cfg, false).unwrap().run_all().unwrap();
        let store = ArtifactStore::open(dir.path()).unwrap();
        let catalog = Arc::new(Catalog::load(&store).unwrap());
        Fixture {
            _dir: dir,
            store,
            catalog,
        }
    })
}

async fn get(uri: &str) -> (StatusCode, Value, axum::http::HeaderMap) {
    let resp = router(fixture().catalog.clone())
        .oneshot(Request::get(uri).body(Body::empty()).unwrap())
        .await
        .unwrap();
    let status = resp.status();
    let headers = resp.headers().clone();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap(), headers)
}

async fn ok(uri: &str) -> Value {
    let (status, body, _) = get(uri).await;
    assert_eq!(status, StatusCode::OK, "{uri}: {body}");
    body
}

async fn error_code(uri: &str) -> (StatusCode, String) {
    let (status, body, _) = get(uri).await;
    assert!(body["error"]["message"].is_string(), "{uri}: {body}");
    (status, body["error"]["code"].as_str().unwrap().to_string())
}

fn ids(results: &Value) -> Vec<String> {
    results
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["movie_id"].as_str().unwrap().to_string())
        .collect()
}

#[tokio::test]
async fn movie_list_and_detail() {
    let movies = ok("/movies").await;
    let movies = movies.as_array().unwrap();
    assert_eq!(movies.len(), 12);
    assert!(movies.iter().all(|m| !m["title"].as_str().unwrap().is_empty()));
    assert_eq!(movies[0]["id"], "m01");

    let detail = ok("/movies/m12").await;
    assert_eq!(detail["title"], "School of Puppies");
    let mods: Vec<&str> = detail["modalities"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m.as_str().unwrap())
        .collect();
    assert!(mods.contains(&"lda") && !mods.contains(&"audio_event") && !mods.contains(&"audio_genre"));

    assert_eq!(
        error_code("/movies/zzz").await,
        (StatusCode::NOT_FOUND, "not_found".into())
    );
    assert_eq!(error_code("/movies/zzz/similar").await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn single_modality_matches_matrix_row() {
    let lda = fixture().store.load_matrix("sim_lda").unwrap();
    let body = ok("/movies/m03/similar?weights=lda:1&n=50").await;
    let expected: Vec<String> = lda
        .ranking(2)
        .into_iter()
        .map(|j| lda.movie_order()[j].clone())
        .collect();
    assert_eq!(ids(&body["results"]), expected);
    assert_eq!(body["label"], "LDA");
    for r in body["results"].as_array().unwrap() {
        let j = lda.index_of(r["movie_id"].as_str().unwrap()).unwrap();
        assert_eq!(r["score"].as_f64().unwrap(), lda.get(2, j));
    }
    let top3 = ok("/movies/m03/similar?weights=lda:1&n=3").await;
    assert_eq!(ids(&top3["results"]), expected[..3].to_vec());
}

#[tokio::test]
async fn unnormalized_weights_match_pairwise_oracle() {
    let store = &fixture().store;
    let a = store.load_matrix("sim_lda").unwrap();
    let b = store.load_matrix("sim_metadata").unwrap();
    let body = ok("/movies/m05/similar?weights=lda:2,metadata:2&n=11").await;
    assert_eq!(body["weights"]["lda"], 0.5);
    assert_eq!(body["weights"]["metadata"], 0.5);
    let i = 4;
    let mut oracle: Vec<(f64, String)> = (0..12)
        .filter(|&j| j != i)
        .map(|j| (0.5 * a.get(i, j) + 0.5 * b.get(i, j), a.movie_order()[j].clone()))
        .collect();
    oracle.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap().then_with(|| x.1.cmp(&y.1)));
    let results = body["results"].as_array().unwrap();
    for (r, (score, id)) in results.iter().zip(&oracle) {
        assert_eq!(r["movie_id"].as_str().unwrap(), id);
        assert!((r["score"].as_f64().unwrap() - score).abs() < 1e-15);
    }
    assert_eq!(results.len(), 11);
}

#[tokio::test]
async fn flagged_movies_drop_out_of_audio_rankings() {
    let body = ok("/movies/m12/similar?weights=audio_event:1").await;
    assert_eq!(body["flagged"], true);
    assert!(body["results"].as_array().unwrap().is_empty());
    let body = ok("/movies/m01/similar?weights=audio_event:1&n=20").await;
    let got = ids(&body["results"]);
    assert_eq!(got.len(), 10);
    assert!(!got.contains(&"m12".to_string()));
    // fused with text, m12 has data again
    let body = ok("/movies/m01/similar?weights=audio_event:1,lda:1&n=20").await;
    assert!(ids(&body["results"]).contains(&"m12".to_string()));
}

#[tokio::test]
async fn bad_queries_are_400() {
    for uri in [
        "/movies/m01/similar?weights=lda:0,metadata:0",
        "/movies/m01/similar?weights=lda:-1",
        "/movies/m01/similar?weights=colour:1",
        "/movies/m01/similar?weights=lda",
        "/movies/m01/similar?n=0",
        "/movies/m01/similar?n=abc",
        "/topics?n=0",
    ] {
        assert_eq!(
            error_code(uri).await,
            (StatusCode::BAD_REQUEST, "bad_request".into()),
            "{uri}"
        );
    }
}

#[tokio::test]
async fn default_weights_are_the_searched_optimum() {
    let report = ok("/eval/report").await;
    let body = ok("/movies/m02/similar").await;
    let mut best = report["best_weights"].as_object().unwrap().clone();
    best.retain(|_, w| w.as_f64().unwrap() > 0.0);
    assert_eq!(body["weights"], Value::Object(best));
    assert_eq!(report["table"]["singular"].as_array().unwrap().len(), 6);
}

#[tokio::test]
async fn topics_endpoints() {
    let all = ok("/topics").await;
    let all = all.as_array().unwrap();
    assert_eq!(all.len(), 8);
    assert!(all.iter().all(|t| t["top_words"].as_array().unwrap().len() == 10));

    let words = ok("/topics/3/words?n=20").await;
    let probs: Vec<f64> = words["top_words"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w["probability"].as_f64().unwrap())
        .collect();
    assert_eq!(probs.len(), 20);
    assert!(probs.windows(2).all(|w| w[0] >= w[1]));
    assert!(probs.iter().all(|&p| p > 0.0 && p <= 1.0));

    let movies = ok("/topics/3/movies").await;
    let weights: Vec<f64> = movies["movies"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["weight"].as_f64().unwrap())
        .collect();
    assert_eq!(weights.len(), 12);
    assert!(weights.windows(2).all(|w| w[0] >= w[1]));

    let mt = ok("/movies/m07/topics").await;
    let ts = mt["topics"].as_array().unwrap();
    assert_eq!(ts.len(), 8);
    let sum: f64 = ts.iter().map(|t| t["weight"].as_f64().unwrap()).sum();
    assert!((sum - 1.0).abs() < 1e-12);

    for uri in ["/topics/8/words", "/topics/x/movies", "/topics/-1/words"] {
        assert_eq!(error_code(uri).await.0, StatusCode::NOT_FOUND, "{uri}");
    }
}

#[tokio::test]
async fn modalities_and_fallback() {
    let m = ok("/modalities").await;
    let m = m.as_array().unwrap();
    assert_eq!(m.len(), 6);
    assert!(m.iter().all(|x| x["available"] == true));
    assert_eq!(m[5]["abbreviation"], "MD");
    assert_eq!(
        error_code("/nothing/here").await,
        (StatusCode::NOT_FOUND, "not_found".into())
    );
}

#[tokio::test]
async fn responses_are_pure() {
    let (_, a, headers) = get("/movies/m09/similar?weights=lda:0.3,metadata:0.7,audio_genre:0.1").await;
    let (_, b, _) = get("/movies/m09/similar?weights=lda:0.3,metadata:0.7,audio_genre:0.1").await;
    assert_eq!(a, b);
    assert_eq!(headers["access-control-allow-origin"], "*");
}

#[tokio::test]
async fn busy_port_is_a_startup_error() {
    let first = moviesim_server::bind("127.0.0.1:0".parse().unwrap()).await.unwrap();
    let addr = first.local_addr().unwrap();
    let err = moviesim_server::bind(addr).await.unwrap_err();
    assert!(matches!(err, ServerError::Bind { .. }));
    assert!(err.to_string().contains(&addr.to_string()));
}

#[test]
fn catalog_needs_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let store = ArtifactStore::open(dir.path()).unwrap();
    store
        .save_json("movies", &Vec::<moviesim_core::corpus::MovieRecord>::new())
        .unwrap();
    assert!(Catalog::load(&store).is_err());
}
