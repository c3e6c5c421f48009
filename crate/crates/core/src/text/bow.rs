use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{TokenStream, Vocabulary};
use crate::error::{Error, Result};

/// Sparse per-movie term counts over a shared vocabulary. Absent columns are
/// zero; stored counts are strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BowCorpus {
    pub vocabulary: Vocabulary,
    pub movie_order: Vec<String>,
    pub counts: Vec<BTreeMap<usize, u32>>,
}

impl BowCorpus {
    pub fn num_docs(&self) -> usize {
        self.counts.len()
    }

    pub fn num_terms(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn doc_len(&self, d: usize) -> u64 {
        self.counts[d].values().map(|&c| c as u64).sum()
    }

    pub fn empty_rows(&self) -> Vec<&str> {
        self.counts
            .iter()
            .zip(&self.movie_order)
            .filter(|(row, _)| row.is_empty())
            .map(|(_, id)| id.as_str())
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.counts.len() != self.movie_order.len() {
            return Err(Error::DimensionMismatch {
                expected: self.movie_order.len(),
                found: self.counts.len(),
            });
        }
        let v = self.vocabulary.len();
        for row in &self.counts {
            if let Some((&col, &c)) = row.iter().find(|(&col, &c)| col >= v || c == 0) {
                return Err(Error::Validation(format!("invalid bag-of-words cell {col} -> {c}")));
            }
        }
        Ok(())
    }
}

pub fn build_bow(streams: &[TokenStream], vocab: &Vocabulary) -> BowCorpus {
    let counts: Vec<BTreeMap<usize, u32>> = streams
        .iter()
        .map(|s| {
            let mut row = BTreeMap::new();
            for id in s.tokens.iter().filter_map(|t| vocab.id(t)) {
                *row.entry(id).or_insert(0) += 1;
            }
            row
        })
        .collect();
    let corpus = BowCorpus {
        vocabulary: vocab.clone(),
        movie_order: streams.iter().map(|s| s.movie_id.clone()).collect(),
        counts,
    };
    for id in corpus.empty_rows() {
        tracing::warn!(movie = id, "no in-vocabulary tokens; keeping an empty row");
    }
    corpus
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vocab(terms: &[&str]) -> Vocabulary {
        Vocabulary::new(terms.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    fn stream(tokens: &[&str]) -> TokenStream {
        TokenStream {
            movie_id: "m".into(),
            tokens: tokens.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn counts_terms() {
        let bow = build_bow(&[stream(&["a", "b", "a"])], &vocab(&["a", "b"]));
        assert_eq!(bow.counts[0], BTreeMap::from([(0, 2), (1, 1)]));
    }

    #[test]
    fn oov_row_kept_empty() {
        let bow = build_bow(&[stream(&["c"])], &vocab(&["a", "b"]));
        assert!(bow.counts[0].is_empty());
        assert_eq!(bow.empty_rows(), vec!["m"]);
    }

    #[test]
    fn columns_in_bounds() {
        let v = vocab(&["a", "b", "c", "d", "e"]);
        let bow = build_bow(&[stream(&["a", "e"]), stream(&["x"]), stream(&["c", "c"])], &v);
        assert_eq!(bow.num_docs(), 3);
        assert!(bow.counts.iter().flat_map(|r| r.keys()).all(|&c| c < 5));
        bow.validate().unwrap();
    }

    proptest! {
        #[test]
        fn token_count_conservation(tokens in proptest::collection::vec("[a-f]", 0..50)) {
            let v = vocab(&["a", "c", "e"]);
            let s = TokenStream { movie_id: "m".into(), tokens: tokens.clone() };
            let bow = build_bow(&[s], &v);
            let in_vocab = tokens.iter().filter(|t| v.id(t).is_some()).count() as u64;
            prop_assert_eq!(bow.doc_len(0), in_vocab);
            prop_assert!(bow.counts[0].values().all(|&c| c > 0));
        }
    }
}
