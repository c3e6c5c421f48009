//! Thin async client for the moviesim HTTP service.

use std::collections::BTreeMap;

use moviesim_core::api::{
    format_weight_query, ErrorResponse, ModalityInfo, MovieDetail, MovieTopics, SimilarResponse, TopicMovies,
};
use moviesim_core::corpus::MovieRecord;
use moviesim_core::pipeline::PipelineReport;
use moviesim_core::similarity::Modality;
use moviesim_core::topics::TopicSummary;
use reqwest::Url;
use serde::de::DeserializeOwned;

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("invalid service URL `{0}`")]
    BadUrl(String),

    #[error("request failed: {0}")]
    Http(#[from] reqwest::Error),

    /// The service answered with an error payload.
    #[error("{status} {code}: {message}")]
    Api { status: u16, code: String, message: String },
}

pub type Result<T> = std::result::Result<T, ClientError>;

#[derive(Debug, Clone)]
pub struct Client {
    http: reqwest::Client,
    base: Url,
}

impl Client {
    pub fn new(base_url: &str) -> Result<Self> {
        let base = Url::parse(base_url).map_err(|_| ClientError::BadUrl(base_url.to_string()))?;
        if base.cannot_be_a_base() {
            return Err(ClientError::BadUrl(base_url.to_string()));
        }
        Ok(Client {
            http: reqwest::Client::new(),
            base,
        })
    }

    fn url(&self, segments: &[&str], query: &[(&str, String)]) -> Url {
        let mut url = self.base.clone();
        url.path_segments_mut()
            .expect("checked in new")
            .pop_if_empty()
            .extend(segments);
        if !query.is_empty() {
            url.query_pairs_mut().extend_pairs(query);
        }
        url
    }

    async fn get<T: DeserializeOwned>(&self, segments: &[&str], query: &[(&str, String)]) -> Result<T> {
        let resp = self.http.get(self.url(segments, query)).send().await?;
        let status = resp.status();
        if status.is_success() {
            return Ok(resp.json().await?);
        }
        let text = resp.text().await?;
        let (code, message) = match serde_json::from_str::<ErrorResponse>(&text) {
            Ok(e) => (e.error.code, e.error.message),
            Err(_) => ("unknown".to_string(), text),
        };
        Err(ClientError::Api {
            status: status.as_u16(),
            code,
            message,
        })
    }

    pub async fn movies(&self) -> Result<Vec<MovieRecord>> {
        self.get(&["movies"], &[]).await
    }

    pub async fn movie(&self, id: &str) -> Result<MovieDetail> {
        self.get(&["movies", id], &[]).await
    }

    pub async fn movie_topics(&self, id: &str) -> Result<MovieTopics> {
        self.get(&["movies", id, "topics"], &[]).await
    }

    /// `weights` are sent as given; the service normalizes them. `None` uses
    /// the service default.
    pub async fn similar(
        &self,
        id: &str,
        weights: Option<&BTreeMap<Modality, f64>>,
        n: Option<usize>,
    ) -> Result<SimilarResponse> {
        let mut q = Vec::new();
        if let Some(w) = weights {
            q.push(("weights", format_weight_query(w.iter().map(|(m, w)| (*m, w)))));
        }
        if let Some(n) = n {
            q.push(("n", n.to_string()));
        }
        self.get(&["movies", id, "similar"], &q).await
    }

    pub async fn topics(&self, n: Option<usize>) -> Result<Vec<TopicSummary>> {
        let q: Vec<_> = n.map(|n| ("n", n.to_string())).into_iter().collect();
        self.get(&["topics"], &q).await
    }

    pub async fn topic_words(&self, topic: usize, n: Option<usize>) -> Result<TopicSummary> {
        let q: Vec<_> = n.map(|n| ("n", n.to_string())).into_iter().collect();
        self.get(&["topics", &topic.to_string(), "words"], &q).await
    }

    pub async fn topic_movies(&self, topic: usize) -> Result<TopicMovies> {
        self.get(&["topics", &topic.to_string(), "movies"], &[]).await
    }

    pub async fn report(&self) -> Result<PipelineReport> {
        self.get(&["eval", "report"], &[]).await
    }

    pub async fn modalities(&self) -> Result<Vec<ModalityInfo>> {
        self.get(&["modalities"], &[]).await
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn urls_escape_segments_and_keep_base_path() {
        let c = Client::new("http://h:1/api/").unwrap();
        let u = c.url(
            &["movies", "a b/c", "similar"],
            &[("weights", "lda:1,metadata:2".into())],
        );
        assert_eq!(
            u.as_str(),
            "http://h:1/api/movies/a%20b%2Fc/similar?weights=lda%3A1%2Cmetadata%3A2"
        );
        assert!(Client::new("not a url").is_err());
        assert!(Client::new("mailto:x@y").is_err());
    }
}
