use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{BowCorpus, Vocabulary};

/// Dense, L2-normalized tf-idf rows; empty rows stay all-zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfidfMatrix {
    pub movie_order: Vec<String>,
    pub vocabulary: Vocabulary,
    pub rows: Vec<Vec<f64>>,
}

impl TfidfMatrix {
    pub fn num_docs(&self) -> usize {
        self.rows.len()
    }

    pub fn num_terms(&self) -> usize {
        self.vocabulary.len()
    }
}

/// Raw tf times `ln(N / df)`, then each row scaled to unit length.
pub fn tfidf(bow: &BowCorpus) -> Result<TfidfMatrix> {
    let n = bow.num_docs();
    if n == 0 {
        return Err(Error::Parameter("tf-idf needs a non-empty corpus".into()));
    }
    let v = bow.num_terms();
    let mut df = vec![0usize; v];
    for row in &bow.counts {
        for &col in row.keys() {
            df[col] += 1;
        }
    }
    let idf: Vec<f64> = df
        .iter()
        .map(|&d| if d == 0 { 0.0 } else { (n as f64 / d as f64).ln() })
        .collect();
    let rows = bow
        .counts
        .iter()
        .map(|counts| {
            let mut row = vec![0.0; v];
            for (&col, &tf) in counts {
                row[col] = tf as f64 * idf[col];
            }
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.iter_mut().for_each(|x| *x /= norm);
            }
            row
        })
        .collect();
    Ok(TfidfMatrix {
        movie_order: bow.movie_order.clone(),
        vocabulary: bow.vocabulary.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn corpus(rows: Vec<Vec<(usize, u32)>>, v: usize) -> BowCorpus {
        BowCorpus {
            vocabulary: Vocabulary::new((0..v).map(|i| format!("t{i}")).collect()).unwrap(),
            movie_order: (0..rows.len()).map(|i| format!("m{i}")).collect(),
            counts: rows
                .into_iter()
                .map(|r| r.into_iter().collect::<BTreeMap<_, _>>())
                .collect(),
        }
    }

    #[test]
    fn weights_follow_formula() {
        // t0 only in doc 0, t1 in both, t2 in doc 0 with tf 2
        let bow = corpus(vec![vec![(0, 1), (1, 3), (2, 2)], vec![(1, 1)]], 3);
        let m = tfidf(&bow).unwrap();
        let ln2 = 2f64.ln();
        let norm = (ln2 * ln2 + (2.0 * ln2).powi(2)).sqrt();
        assert!((m.rows[0][0] - ln2 / norm).abs() < 1e-15);
        assert_eq!(m.rows[0][1], 0.0);
        assert!((m.rows[0][2] - 2.0 * ln2 / norm).abs() < 1e-15);
        // doc 1 only holds a term present everywhere
        assert!(m.rows[1].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn single_term_row_is_unit() {
        let bow = corpus(vec![vec![(0, 4)], vec![(1, 1)]], 2);
        let m = tfidf(&bow).unwrap();
        assert_eq!(m.rows[0], vec![1.0, 0.0]);
    }

    #[test]
    fn row_norms_are_zero_or_one() {
        let bow = corpus(
            vec![
                vec![(0, 2), (3, 1)],
                vec![(1, 5), (2, 1), (3, 1)],
                vec![],
                vec![(0, 1), (1, 1)],
            ],
            4,
        );
        for row in tfidf(&bow).unwrap().rows {
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(norm == 0.0 || (norm - 1.0).abs() < 1e-12);
            assert!(row.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn empty_corpus_rejected() {
        assert!(tfidf(&corpus(vec![], 2)).is_err());
    }
}
