//! Request and response bodies of the HTTP service, shared with the client.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::similarity::{FusionWeights, Modality};

/// A movie and the modalities that have data for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovieDetail {
    pub id: String,
    pub title: String,
    pub cast: BTreeSet<String>,
    pub directors: BTreeSet<String>,
    pub genres: BTreeSet<String>,
    pub modalities: Vec<Modality>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicWeight {
    pub topic_id: usize,
    pub weight: f64,
}

/// Topic proportions of one movie, heaviest first (ties by topic id).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovieTopics {
    pub movie_id: String,
    pub topics: Vec<TopicWeight>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovieWeight {
    pub movie_id: String,
    pub title: String,
    pub weight: f64,
}

/// Movies by their proportion of one topic, heaviest first (ties by id).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicMovies {
    pub topic_id: usize,
    pub movies: Vec<MovieWeight>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarMovie {
    pub movie_id: String,
    pub title: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarResponse {
    pub movie_id: String,
    /// The weights actually used, after normalization.
    pub weights: FusionWeights,
    pub label: String,
    /// The query movie has no data under these weights; `results` is empty.
    pub flagged: bool,
    pub results: Vec<SimilarMovie>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalityInfo {
    pub modality: Modality,
    pub abbreviation: String,
    pub display_name: String,
    /// A similarity matrix is loaded and at least one movie has data.
    pub available: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

/// Every non-2xx response carries this body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorResponse {
    pub error: ErrorBody,
}

pub mod codes {
    pub const NOT_FOUND: &str = "not_found";
    pub const BAD_REQUEST: &str = "bad_request";
    pub const INTERNAL: &str = "internal";
}

/// Query string form of weights: `lda:0.5,metadata:0.5`.
pub fn format_weight_query<'a>(weights: impl IntoIterator<Item = (Modality, &'a f64)>) -> String {
    weights
        .into_iter()
        .map(|(m, w)| format!("{m}:{w}"))
        .collect::<Vec<_>>()
        .join(",")
}
