//! Tag-space ground truth and the two ranking metrics: median ground-truth
//! rank of each movie's first recommendation, and the share of first
//! recommendations landing in the ground-truth top 10.

mod report;

pub use report::{render_table, ReportTable};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::TagVector;
use crate::error::{Error, Result};
use crate::similarity::{pairwise_cosine, Provenance, SimilarityMatrix};

pub const TOP_K: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub matrix: SimilarityMatrix,
    pub tag_space_size: usize,
}

/// Cosine similarity over raw tag-relevance vectors in the shared tag space.
pub fn ground_truth(tags: &[TagVector], movie_order: &[String]) -> Result<GroundTruth> {
    if tags.is_empty() {
        return Err(Error::NoGroundTruth("tag file contains no rows".into()));
    }
    let by_movie: BTreeMap<&str, &TagVector> = tags.iter().map(|t| (t.movie_id.as_str(), t)).collect();
    let missing: Vec<&str> = movie_order
        .iter()
        .map(String::as_str)
        .filter(|id| !by_movie.contains_key(id))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Validation(format!(
            "movies without tags: {}",
            missing.join(", ")
        )));
    }
    let space: Vec<&str> = crate::corpus::tag_space(tags).into_iter().collect();
    let column: BTreeMap<&str, usize> = space.iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let vectors: Vec<Vec<f64>> = movie_order
        .iter()
        .map(|id| {
            let tv = by_movie[id.as_str()];
            let mut v = vec![0.0; space.len()];
            for (tag, w) in &tv.tag_weights {
                v[column[tag.as_str()]] = *w;
            }
            v
        })
        .collect();
    if let Some(i) = vectors.iter().position(|v| v.iter().all(|&x| x == 0.0)) {
        return Err(Error::Validation(format!(
            "movie {:?} has no tag with positive relevance",
            movie_order[i]
        )));
    }
    Ok(GroundTruth {
        matrix: pairwise_cosine(&vectors, movie_order.to_vec(), Provenance::GroundTruth)?,
        tag_space_size: space.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankDetail {
    pub movie_id: String,
    pub first_rec: String,
    pub gt_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: String,
    pub median_first_rec_rank: f64,
    pub top10_pct: f64,
    pub details: Vec<RankDetail>,
    /// Movies with no data in this model, left out of both metrics.
    pub excluded: Vec<String>,
}

fn check_aligned(model: &SimilarityMatrix, gt: &SimilarityMatrix) -> Result<()> {
    if model.movie_order() != gt.movie_order() {
        return Err(Error::Validation(
            "model and ground-truth matrices use different movie orders".into(),
        ));
    }
    if model.len() < 2 {
        return Err(Error::Parameter("ranking needs at least 2 movies".into()));
    }
    Ok(())
}

/// Index of the model's top recommendation for movie `i`: highest similarity
/// among other non-flagged movies, ties to the smallest id.
fn first_rec(model: &SimilarityMatrix, i: usize) -> Option<usize> {
    let ids = model.movie_order();
    let row = model.row(i);
    (0..model.len())
        .filter(|&j| j != i && !model.is_flagged(j))
        .min_by(|&a, &b| row[b].total_cmp(&row[a]).then_with(|| ids[a].cmp(&ids[b])))
}

/// 1-based position of `target` among the other movies sorted by descending
/// ground-truth similarity to `i` (ties by id).
fn gt_rank(gt: &SimilarityMatrix, i: usize, target: usize) -> usize {
    let ids = gt.movie_order();
    let row = gt.row(i);
    let t = row[target];
    1 + (0..gt.len())
        .filter(|&j| j != i && j != target)
        .filter(|&j| row[j] > t || (row[j] == t && ids[j] < ids[target]))
        .count()
}

fn rank_at(model: &SimilarityMatrix, gt: &SimilarityMatrix, i: usize) -> Option<(usize, usize)> {
    if model.is_flagged(i) {
        return None;
    }
    let r = first_rec(model, i)?;
    Some((r, gt_rank(gt, i, r)))
}

/// Ground-truth rank of `movie`'s first recommendation, or `None` when the
/// movie has no data in `model`.
pub fn first_rec_rank(model: &SimilarityMatrix, gt: &SimilarityMatrix, movie: &str) -> Result<Option<usize>> {
    check_aligned(model, gt)?;
    let i = model
        .index_of(movie)
        .ok_or_else(|| Error::Parameter(format!("unknown movie {movie:?}")))?;
    Ok(rank_at(model, gt, i).map(|(_, rank)| rank))
}

pub fn median(values: &[usize]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let mid = sorted.len() / 2;
    Some(if sorted.len() % 2 == 1 {
        sorted[mid] as f64
    } else {
        (sorted[mid - 1] + sorted[mid]) as f64 / 2.0
    })
}

fn top_k_pct(ranks: &[usize]) -> f64 {
    if ranks.is_empty() {
        return 0.0;
    }
    100.0 * ranks.iter().filter(|&&r| r <= TOP_K).count() as f64 / ranks.len() as f64
}

fn per_movie_ranks(model: &SimilarityMatrix, gt: &SimilarityMatrix) -> Result<Vec<usize>> {
    check_aligned(model, gt)?;
    Ok((0..model.len())
        .filter_map(|i| rank_at(model, gt, i))
        .map(|(_, r)| r)
        .collect())
}

pub fn median_first_rec_rank(model: &SimilarityMatrix, gt: &SimilarityMatrix) -> Result<f64> {
    median(&per_movie_ranks(model, gt)?).ok_or_else(|| Error::Validation("no movie can be ranked by this model".into()))
}

pub fn top10_pct(model: &SimilarityMatrix, gt: &SimilarityMatrix) -> Result<f64> {
    check_corpus_size(model)?;
    Ok(top_k_pct(&per_movie_ranks(model, gt)?))
}

fn check_corpus_size(model: &SimilarityMatrix) -> Result<()> {
    if model.len() <= TOP_K {
        return Err(Error::Parameter(format!(
            "top-{TOP_K} percentage needs at least {} movies, got {}",
            TOP_K + 1,
            model.len()
        )));
    }
    Ok(())
}

/// Both metrics together with the per-movie detail rows they derive from.
pub fn evaluate(name: &str, model: &SimilarityMatrix, gt: &SimilarityMatrix) -> Result<EvalReport> {
    check_aligned(model, gt)?;
    check_corpus_size(model)?;
    let ids = model.movie_order();
    let mut details = Vec::new();
    let mut excluded = Vec::new();
    for i in 0..model.len() {
        match rank_at(model, gt, i) {
            Some((r, rank)) => details.push(RankDetail {
                movie_id: ids[i].clone(),
                first_rec: ids[r].clone(),
                gt_rank: rank,
            }),
            None => excluded.push(ids[i].clone()),
        }
    }
    let ranks: Vec<usize> = details.iter().map(|d| d.gt_rank).collect();
    let median_first_rec_rank =
        median(&ranks).ok_or_else(|| Error::Validation(format!("model {name:?} cannot rank any movie")))?;
    Ok(EvalReport {
        model: name.to_string(),
        median_first_rec_rank,
        top10_pct: top_k_pct(&ranks),
        details,
        excluded,
    })
}

/// One report row per named model, in input order.
pub fn report(models: &[(String, SimilarityMatrix)], gt: &SimilarityMatrix) -> Result<Vec<EvalReport>> {
    models.iter().map(|(name, m)| evaluate(name, m, gt)).collect()
}
