//! Immutable view over a finished artifact directory. Every query is a pure
//! function of the loaded artifacts and its arguments.

use std::collections::{BTreeMap, HashMap};

use moviesim_core::api::{
    ModalityInfo, MovieDetail, MovieTopics, MovieWeight, SimilarMovie, SimilarResponse, TopicMovies, TopicWeight,
};
use moviesim_core::corpus::{ArtifactStore, MovieRecord};
use moviesim_core::pipeline::{names, PipelineReport};
use moviesim_core::similarity::{fuse, parse_weight_list, FusionWeights, Modality, SimilarityMatrix};
use moviesim_core::topics::{lda_doc_topics, topic_top_words, LdaModel, TopicSummary};
use moviesim_core::Error;

use crate::error::ApiFailure;

pub const DEFAULT_SIMILAR: usize = 10;
pub const DEFAULT_WORDS: usize = 20;
pub const DEFAULT_TOPIC_WORDS: usize = 10;

pub struct Catalog {
    movies: Vec<MovieRecord>,
    index: HashMap<String, usize>,
    lda: Option<(LdaModel, Vec<Vec<f64>>)>,
    matrices: BTreeMap<Modality, SimilarityMatrix>,
    report: Option<PipelineReport>,
}

impl Catalog {
    /// Loads whatever the pipeline produced. Needs the ingested movie list
    /// and at least one modality matrix.
    pub fn load(store: &ArtifactStore) -> Result<Self, Error> {
        let movies: Vec<MovieRecord> = store.load_json(names::MOVIES)?;
        let lda = if store.has_json(names::LDA) {
            let model: LdaModel = store.load_json(names::LDA)?;
            let theta = lda_doc_topics(&model);
            Some((model, theta))
        } else {
            None
        };
        let mut matrices = BTreeMap::new();
        for m in Modality::ALL {
            let name = names::similarity(m);
            if store.has_matrix(&name) {
                matrices.insert(m, store.load_matrix(&name)?);
            }
        }
        let report = if store.has_json(names::REPORT) {
            Some(store.load_json(names::REPORT)?)
        } else {
            None
        };
        Self::new(movies, lda, matrices, report)
    }

    pub fn new(
        movies: Vec<MovieRecord>,
        lda: Option<(LdaModel, Vec<Vec<f64>>)>,
        matrices: BTreeMap<Modality, SimilarityMatrix>,
        report: Option<PipelineReport>,
    ) -> Result<Self, Error> {
        if matrices.is_empty() {
            return Err(Error::Validation(
                "no similarity matrices in the artifact directory; run the pipeline first".into(),
            ));
        }
        let order: Vec<String> = movies.iter().map(|m| m.id.clone()).collect();
        for (m, matrix) in &matrices {
            if matrix.movie_order() != order.as_slice() {
                return Err(Error::Validation(format!("{m} matrix does not match the movie list")));
            }
        }
        if let Some((model, _)) = &lda {
            if model.movie_order != order {
                return Err(Error::Validation("LDA model does not match the movie list".into()));
            }
        }
        let index = order.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        Ok(Catalog {
            movies,
            index,
            lda,
            matrices,
            report,
        })
    }

    fn movie_index(&self, id: &str) -> Result<usize, ApiFailure> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| ApiFailure::not_found(format!("no movie `{id}`")))
    }

    fn lda(&self) -> Result<&(LdaModel, Vec<Vec<f64>>), ApiFailure> {
        self.lda
            .as_ref()
            .ok_or_else(|| ApiFailure::not_found("no topic model has been trained"))
    }

    fn topic_index(&self, id: &str) -> Result<usize, ApiFailure> {
        let (model, _) = self.lda()?;
        id.parse::<usize>()
            .ok()
            .filter(|&t| t < model.num_topics)
            .ok_or_else(|| ApiFailure::not_found(format!("no topic `{id}`")))
    }

    pub fn movies(&self) -> &[MovieRecord] {
        &self.movies
    }

    pub fn movie(&self, id: &str) -> Result<MovieDetail, ApiFailure> {
        let i = self.movie_index(id)?;
        let m = &self.movies[i];
        Ok(MovieDetail {
            id: m.id.clone(),
            title: m.title.clone(),
            cast: m.cast.clone(),
            directors: m.directors.clone(),
            genres: m.genres.clone(),
            modalities: self
                .matrices
                .iter()
                .filter(|(_, matrix)| !matrix.is_flagged(i))
                .map(|(m, _)| *m)
                .collect(),
        })
    }

    pub fn movie_topics(&self, id: &str) -> Result<MovieTopics, ApiFailure> {
        let i = self.movie_index(id)?;
        let (_, theta) = self.lda()?;
        let mut topics: Vec<TopicWeight> = theta[i]
            .iter()
            .enumerate()
            .map(|(topic_id, &weight)| TopicWeight { topic_id, weight })
            .collect();
        topics.sort_by(|a, b| b.weight.total_cmp(&a.weight).then(a.topic_id.cmp(&b.topic_id)));
        Ok(MovieTopics {
            movie_id: id.to_string(),
            topics,
        })
    }

    pub fn topics(&self, n: usize) -> Result<Vec<TopicSummary>, ApiFailure> {
        check_n(n)?;
        let (model, _) = self.lda()?;
        (0..model.num_topics)
            .map(|t| topic_top_words(model, t, n).map_err(|e| ApiFailure::internal(e.to_string())))
            .collect()
    }

    pub fn topic_words(&self, id: &str, n: usize) -> Result<TopicSummary, ApiFailure> {
        check_n(n)?;
        let t = self.topic_index(id)?;
        topic_top_words(&self.lda()?.0, t, n).map_err(|e| ApiFailure::internal(e.to_string()))
    }

    pub fn topic_movies(&self, id: &str) -> Result<TopicMovies, ApiFailure> {
        let t = self.topic_index(id)?;
        let (_, theta) = self.lda()?;
        let mut movies: Vec<MovieWeight> = self
            .movies
            .iter()
            .zip(theta)
            .map(|(m, row)| MovieWeight {
                movie_id: m.id.clone(),
                title: m.title.clone(),
                weight: row[t],
            })
            .collect();
        movies.sort_by(|a, b| b.weight.total_cmp(&a.weight).then_with(|| a.movie_id.cmp(&b.movie_id)));
        Ok(TopicMovies { topic_id: t, movies })
    }

    pub fn report(&self) -> Result<&PipelineReport, ApiFailure> {
        self.report
            .as_ref()
            .ok_or_else(|| ApiFailure::not_found("no evaluation report; the corpus needs tags and a full run"))
    }

    pub fn modalities(&self) -> Vec<ModalityInfo> {
        Modality::ALL
            .iter()
            .map(|&m| ModalityInfo {
                modality: m,
                abbreviation: m.abbreviation().to_string(),
                display_name: m.display_name().to_string(),
                available: self.matrices.get(&m).is_some_and(|x| x.flagged().iter().any(|f| !f)),
            })
            .collect()
    }

    /// Weights used when a request names none: the searched optimum when
    /// there is one, otherwise LDA alone.
    fn default_weights(&self) -> FusionWeights {
        self.report
            .as_ref()
            .and_then(|r| r.best_weights.clone())
            .filter(|w| w.active().all(|(m, _)| self.matrices.contains_key(&m)))
            .unwrap_or_else(|| {
                let m = if self.matrices.contains_key(&Modality::Lda) {
                    Modality::Lda
                } else {
                    *self.matrices.keys().next().expect("catalog has a matrix")
                };
                FusionWeights::single(m)
            })
    }

    /// Parses and normalizes a `modality:weight,...` list.
    pub fn weights(&self, query: Option<&str>) -> Result<FusionWeights, ApiFailure> {
        let Some(q) = query.filter(|q| !q.trim().is_empty()) else {
            return Ok(self.default_weights());
        };
        let raw = parse_weight_list(q).map_err(|e| ApiFailure::bad_request(e.to_string()))?;
        let weights = FusionWeights::normalized(raw).map_err(|e| ApiFailure::bad_request(e.to_string()))?;
        if let Some((m, _)) = weights.active().find(|(m, _)| !self.matrices.contains_key(m)) {
            return Err(ApiFailure::bad_request(format!(
                "no similarity matrix for modality `{m}`"
            )));
        }
        Ok(weights)
    }

    /// Ranking of other movies under fused weights. Movies without data in
    /// the fused matrix are neither queried nor returned.
    pub fn similar(&self, id: &str, weights: Option<&str>, n: usize) -> Result<SimilarResponse, ApiFailure> {
        check_n(n)?;
        let i = self.movie_index(id)?;
        let weights = self.weights(weights)?;
        // zero entries carry no information and may name modalities not loaded here
        let weights =
            FusionWeights::new(weights.active().collect()).map_err(|e| ApiFailure::internal(e.to_string()))?;
        let mats: BTreeMap<Modality, SimilarityMatrix> =
            weights.active().map(|(m, _)| (m, self.matrices[&m].clone())).collect();
        let fused = fuse(&mats, &weights).map_err(|e| ApiFailure::internal(e.to_string()))?;
        let flagged = fused.is_flagged(i);
        let results = if flagged {
            Vec::new()
        } else {
            fused
                .ranking(i)
                .into_iter()
                .filter(|&j| !fused.is_flagged(j))
                .take(n)
                .map(|j| SimilarMovie {
                    movie_id: self.movies[j].id.clone(),
                    title: self.movies[j].title.clone(),
                    score: fused.get(i, j),
                })
                .collect()
        };
        Ok(SimilarResponse {
            movie_id: id.to_string(),
            label: weights.label(),
            weights,
            flagged,
            results,
        })
    }
}

fn check_n(n: usize) -> Result<(), ApiFailure> {
    if n == 0 {
        return Err(ApiFailure::bad_request("n must be at least 1"));
    }
    Ok(())
}
