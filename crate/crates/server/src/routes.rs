use std::sync::Arc;

use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue};
use axum::response::Response;
use axum::routing::get;
use axum::{Json, Router};
use moviesim_core::api::{ModalityInfo, MovieDetail, MovieTopics, SimilarResponse, TopicMovies};
use moviesim_core::corpus::MovieRecord;
use moviesim_core::pipeline::PipelineReport;
use moviesim_core::topics::TopicSummary;
use serde::Deserialize;

use crate::error::ApiFailure;
use crate::state::{Catalog, DEFAULT_SIMILAR, DEFAULT_TOPIC_WORDS, DEFAULT_WORDS};

type AppState = State<Arc<Catalog>>;
type ApiResult<T> = Result<Json<T>, ApiFailure>;

#[derive(Debug, Deserialize)]
struct SimilarQuery {
    weights: Option<String>,
    n: Option<usize>,
}

#[derive(Debug, Deserialize)]
struct CountQuery {
    n: Option<usize>,
}

fn query<T>(q: Result<Query<T>, QueryRejection>) -> Result<T, ApiFailure> {
    q.map(|Query(v)| v).map_err(|e| ApiFailure::bad_request(e.body_text()))
}

async fn movies(State(c): AppState) -> Json<Vec<MovieRecord>> {
    Json(c.movies().to_vec())
}

async fn movie(State(c): AppState, Path(id): Path<String>) -> ApiResult<MovieDetail> {
    c.movie(&id).map(Json)
}

async fn movie_topics(State(c): AppState, Path(id): Path<String>) -> ApiResult<MovieTopics> {
    c.movie_topics(&id).map(Json)
}

async fn similar(
    State(c): AppState,
    Path(id): Path<String>,
    q: Result<Query<SimilarQuery>, QueryRejection>,
) -> ApiResult<SimilarResponse> {
    let q = query(q)?;
    c.similar(&id, q.weights.as_deref(), q.n.unwrap_or(DEFAULT_SIMILAR))
        .map(Json)
}

async fn topics(State(c): AppState, q: Result<Query<CountQuery>, QueryRejection>) -> ApiResult<Vec<TopicSummary>> {
    c.topics(query(q)?.n.unwrap_or(DEFAULT_TOPIC_WORDS)).map(Json)
}

async fn topic_words(
    State(c): AppState,
    Path(id): Path<String>,
    q: Result<Query<CountQuery>, QueryRejection>,
) -> ApiResult<TopicSummary> {
    c.topic_words(&id, query(q)?.n.unwrap_or(DEFAULT_WORDS)).map(Json)
}

async fn topic_movies(State(c): AppState, Path(id): Path<String>) -> ApiResult<TopicMovies> {
    c.topic_movies(&id).map(Json)
}

async fn report(State(c): AppState) -> ApiResult<PipelineReport> {
    c.report().cloned().map(Json)
}

async fn modalities(State(c): AppState) -> Json<Vec<ModalityInfo>> {
    Json(c.modalities())
}

async fn not_found() -> ApiFailure {
    ApiFailure::not_found("no such endpoint")
}

// the browser UI may be served from another origin; everything here is public and read-only
async fn allow_any_origin(mut resp: Response) -> Response {
    resp.headers_mut()
        .insert(header::ACCESS_CONTROL_ALLOW_ORIGIN, HeaderValue::from_static("*"));
    resp
}

pub fn router(catalog: Arc<Catalog>) -> Router {
    Router::new()
        .route("/movies", get(movies))
        .route("/movies/{id}", get(movie))
        .route("/movies/{id}/topics", get(movie_topics))
        .route("/movies/{id}/similar", get(similar))
        .route("/topics", get(topics))
        .route("/topics/{id}/words", get(topic_words))
        .route("/topics/{id}/movies", get(topic_movies))
        .route("/eval/report", get(report))
        .route("/modalities", get(modalities))
        .fallback(not_found)
        .layer(axum::middleware::map_response(allow_any_origin))
        .with_state(catalog)
}
