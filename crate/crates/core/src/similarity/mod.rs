//! Per-modality movie vectors, cosine similarity matrices and their fusion.

mod fusion;
mod metadata;

pub use fusion::{fuse, parse_weight_list, search_weights, simplex_grid, FusionWeights, WeightSearch};
pub use metadata::metadata_vectors;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Tfidf,
    Lsi,
    Lda,
    AudioEvent,
    AudioGenre,
    Metadata,
}

impl Modality {
    pub const ALL: [Modality; 6] = [
        Modality::Tfidf,
        Modality::Lsi,
        Modality::Lda,
        Modality::AudioEvent,
        Modality::AudioGenre,
        Modality::Metadata,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Tfidf => "tfidf",
            Modality::Lsi => "lsi",
            Modality::Lda => "lda",
            Modality::AudioEvent => "audio_event",
            Modality::AudioGenre => "audio_genre",
            Modality::Metadata => "metadata",
        }
    }

    /// Short label used in fusion model names (`MD + T + A`).
    pub fn abbreviation(self) -> &'static str {
        match self {
            Modality::Tfidf => "Tf-idf",
            Modality::Lsi => "LSI",
            Modality::Lda => "T",
            Modality::AudioEvent => "A",
            Modality::AudioGenre => "M",
            Modality::Metadata => "MD",
        }
    }

    /// Row label for single-modality reports.
    pub fn display_name(self) -> &'static str {
        match self {
            Modality::Tfidf => "Tf-idf",
            Modality::Lsi => "LSI",
            Modality::Lda => "LDA",
            Modality::AudioEvent => "Audio (A)",
            Modality::AudioGenre => "Music (M)",
            Modality::Metadata => "Metadata (MD)",
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Modality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Modality::ALL
            .into_iter()
            .find(|m| m.as_str() == s.trim())
            .ok_or_else(|| Error::Parameter(format!("unknown modality {s:?}")))
    }
}

/// Dense per-movie vectors for one modality. `flagged[i]` marks movies whose
/// vector is all-zero (no data for this modality).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalityVectors {
    pub modality: Modality,
    pub movie_order: Vec<String>,
    pub vectors: Vec<Vec<f64>>,
    pub flagged: Vec<bool>,
}

impl ModalityVectors {
    pub fn new(modality: Modality, movie_order: Vec<String>, vectors: Vec<Vec<f64>>) -> Result<Self> {
        if movie_order.len() != vectors.len() {
            return Err(Error::DimensionMismatch {
                expected: movie_order.len(),
                found: vectors.len(),
            });
        }
        let dim = vectors.first().map_or(0, Vec::len);
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        if vectors.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Validation(format!(
                "{modality} vectors contain non-finite values"
            )));
        }
        let flagged = vectors.iter().map(|v| v.iter().all(|&x| x == 0.0)).collect();
        Ok(ModalityVectors {
            modality,
            movie_order,
            vectors,
            flagged,
        })
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Provenance {
    Modality(Modality),
    Fusion(FusionWeights),
    GroundTruth,
}

/// Symmetric movie x movie similarity matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    values: Vec<f64>,
    movie_order: Vec<String>,
    provenance: Provenance,
    flagged: Vec<bool>,
}

impl SimilarityMatrix {
    pub fn from_parts(
        values: Vec<f64>,
        movie_order: Vec<String>,
        provenance: Provenance,
        flagged: Vec<bool>,
    ) -> Result<Self> {
        let n = movie_order.len();
        if values.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: values.len(),
            });
        }
        if flagged.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: flagged.len(),
            });
        }
        let mut seen = HashSet::new();
        if let Some(dup) = movie_order.iter().find(|id| !seen.insert(id.as_str())) {
            return Err(Error::Validation(format!("duplicate movie id {dup:?} in matrix")));
        }
        Ok(SimilarityMatrix {
            values,
            movie_order,
            provenance,
            flagged,
        })
    }

    pub fn len(&self) -> usize {
        self.movie_order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.movie_order.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn movie_order(&self) -> &[String] {
        &self.movie_order
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.movie_order.iter().position(|m| m == id)
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn flagged(&self) -> &[bool] {
        &self.flagged
    }

    pub fn is_flagged(&self, i: usize) -> bool {
        self.flagged[i]
    }

    pub fn max_asymmetry(&self) -> f64 {
        let n = self.len();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (self.get(i, j) - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    /// Movies other than `i`, by descending similarity, ties by ascending id.
    pub fn ranking(&self, i: usize) -> Vec<usize> {
        let mut others: Vec<usize> = (0..self.len()).filter(|&j| j != i).collect();
        let row = self.row(i);
        others.sort_by(|&a, &b| {
            row[b]
                .total_cmp(&row[a])
                .then_with(|| self.movie_order[a].cmp(&self.movie_order[b]))
        });
        others
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Cosine similarity; 0 when either vector has zero norm.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(cosine_unchecked(a, b, norm(a), norm(b)))
}

fn cosine_unchecked(a: &[f64], b: &[f64], na: f64, nb: f64) -> f64 {
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

pub fn similarity_matrix(mv: &ModalityVectors) -> Result<SimilarityMatrix> {
    pairwise_cosine(&mv.vectors, mv.movie_order.clone(), Provenance::Modality(mv.modality))
}

pub(crate) fn pairwise_cosine(
    vectors: &[Vec<f64>],
    movie_order: Vec<String>,
    provenance: Provenance,
) -> Result<SimilarityMatrix> {
    let n = vectors.len();
    if n < 2 {
        return Err(Error::Parameter(format!("similarity needs at least 2 movies, got {n}")));
    }
    let dim = vectors[0].len();
    if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: v.len(),
        });
    }
    let norms: Vec<f64> = vectors.iter().map(|v| norm(v)).collect();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| {
                    if i == j {
                        if norms[i] > 0.0 {
                            1.0
                        } else {
                            0.0
                        }
                    } else {
                        cosine_unchecked(&vectors[i], &vectors[j], norms[i], norms[j])
                    }
                })
                .collect()
        })
        .collect();
    let mut values = vec![0.0; n * n];
    for (i, row) in upper.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            let j = i + k;
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    let flagged = norms.iter().map(|&x| x == 0.0).collect();
    SimilarityMatrix::from_parts(values, movie_order, provenance, flagged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("m{i}")).collect()
    }

    #[test]
    fn cosine_closed_forms() {
        assert!((cosine(&[1.0, 2.0], &[1.0, 2.0]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let c = cosine(&[1.0, 1.0, 0.0], &[1.0, 0.0, 0.0]).unwrap();
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(
            cosine(&[1.0], &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn identical_and_orthogonal_pairs() {
        let mv = ModalityVectors::new(Modality::Lda, ids(2), vec![vec![0.3, 0.7], vec![0.3, 0.7]]).unwrap();
        let m = similarity_matrix(&mv).unwrap();
        assert_eq!(m.values(), &[1.0, 1.0, 1.0, 1.0]);

        let mv = ModalityVectors::new(Modality::Lda, ids(2), vec![vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let m = similarity_matrix(&mv).unwrap();
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.get(1, 0), 0.0);
    }

    #[test]
    fn zero_vector_is_flagged() {
        let mv = ModalityVectors::new(
            Modality::AudioEvent,
            ids(3),
            vec![vec![1.0, 0.0], vec![0.0, 0.0], vec![1.0, 1.0]],
        )
        .unwrap();
        assert_eq!(mv.flagged, vec![false, true, false]);
        let m = similarity_matrix(&mv).unwrap();
        assert_eq!(m.flagged(), &[false, true, false]);
        assert_eq!(m.get(1, 1), 0.0);
        assert_eq!(m.get(1, 2), 0.0);
    }

    #[test]
    fn needs_two_movies() {
        let mv = ModalityVectors::new(Modality::Lda, ids(1), vec![vec![1.0]]).unwrap();
        assert!(similarity_matrix(&mv).is_err());
    }

    #[test]
    fn ragged_vectors_rejected() {
        assert!(ModalityVectors::new(Modality::Lda, ids(2), vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(ModalityVectors::new(Modality::Lda, ids(2), vec![vec![f64::NAN], vec![1.0]]).is_err());
    }

    #[test]
    fn modality_names_round_trip() {
        for m in Modality::ALL {
            assert_eq!(m.as_str().parse::<Modality>().unwrap(), m);
        }
        assert!("video".parse::<Modality>().is_err());
    }

    #[test]
    fn ranking_breaks_ties_by_id() {
        let m = SimilarityMatrix::from_parts(
            vec![1.0, 0.5, 0.5, 0.5, 1.0, 0.2, 0.5, 0.2, 1.0],
            vec!["x".into(), "c".into(), "b".into()],
            Provenance::GroundTruth,
            vec![false; 3],
        )
        .unwrap();
        assert_eq!(m.ranking(0), vec![2, 1]);
    }

    proptest! {
        #[test]
        fn matches_pairwise_oracle(vs in proptest::collection::vec(proptest::collection::vec(-5.0f64..5.0, 4), 2..8)) {
            let n = vs.len();
            let mv = ModalityVectors::new(Modality::Lsi, ids(n), vs.clone()).unwrap();
            let m = similarity_matrix(&mv).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let dot: f64 = vs[i].iter().zip(&vs[j]).map(|(a, b)| a * b).sum();
                    let na = vs[i].iter().map(|a| a * a).sum::<f64>().sqrt();
                    let nb = vs[j].iter().map(|a| a * a).sum::<f64>().sqrt();
                    let want = if na == 0.0 || nb == 0.0 { 0.0 } else if i == j { 1.0 } else { dot / (na * nb) };
                    prop_assert!((m.get(i, j) - want).abs() < 1e-12);
                }
            }
            prop_assert!(m.max_asymmetry() <= 1e-12);
        }
    }
}
