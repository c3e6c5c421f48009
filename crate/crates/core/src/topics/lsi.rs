use serde::{Deserialize, Serialize};

use super::svd::thin_svd;
use super::TfidfMatrix;
use crate::error::{Error, Result};

/// Rank-K truncated SVD of the movie x term tf-idf matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsiModel {
    pub k: usize,
    pub movie_order: Vec<String>,
    /// vocabulary x K right singular vectors.
    pub term_vectors: Vec<Vec<f64>>,
    pub singular_values: Vec<f64>,
    /// movies x K, left singular vectors scaled by the singular values.
    pub doc_vectors: Vec<Vec<f64>>,
}

impl LsiModel {
    /// `U_K S_K V_K^T`, movies x terms.
    pub fn reconstruction(&self) -> Vec<Vec<f64>> {
        self.doc_vectors
            .iter()
            .map(|d| {
                self.term_vectors
                    .iter()
                    .map(|t| d.iter().zip(t).map(|(a, b)| a * b).sum())
                    .collect()
            })
            .collect()
    }

    pub fn reconstruction_error(&self, original: &[Vec<f64>]) -> f64 {
        self.reconstruction()
            .iter()
            .flatten()
            .zip(original.iter().flatten())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

pub fn lsi_fit(tfidf: &TfidfMatrix, k: usize) -> Result<LsiModel> {
    lsi_fit_rows(&tfidf.rows, tfidf.movie_order.clone(), k)
}

pub(crate) fn lsi_fit_rows(rows: &[Vec<f64>], movie_order: Vec<String>, k: usize) -> Result<LsiModel> {
    let d = rows.len();
    let v = rows.first().map_or(0, Vec::len);
    let limit = d.min(v);
    if k < 1 || k > limit {
        return Err(Error::Parameter(format!(
            "LSI dimension K={k} must lie in [1, {limit}]"
        )));
    }
    let svd = thin_svd(rows)?;
    let top = svd.s[0];
    let sk = svd.s[k - 1];
    if sk.is_nan() || sk <= top * 1e-12 {
        return Err(Error::Parameter(format!(
            "LSI dimension K={k} exceeds the numerical rank of the tf-idf matrix (sigma_K = {sk:e})"
        )));
    }
    let singular_values = svd.s[..k].to_vec();
    let doc_vectors = svd
        .u
        .iter()
        .map(|row| (0..k).map(|j| row[j] * singular_values[j]).collect())
        .collect();
    let term_vectors = svd.v.iter().map(|row| row[..k].to_vec()).collect();
    Ok(LsiModel {
        k,
        movie_order,
        term_vectors,
        singular_values,
        doc_vectors,
    })
}
