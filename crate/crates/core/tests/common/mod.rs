//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use moviesim_core::similarity::{Modality, Provenance, SimilarityMatrix};
use moviesim_core::text::Vocabulary;
use moviesim_core::topics::TfidfMatrix;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("m{i:02}")).collect()
}

pub fn random_rows(rng: &mut impl Rng, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

/// Product of a `rows x k` and a `k x cols` random factor.
pub fn rank_k_rows(rng: &mut impl Rng, rows: usize, cols: usize, k: usize) -> Vec<Vec<f64>> {
    let a = random_rows(rng, rows, k);
    let b = random_rows(rng, k, cols);
    a.iter()
        .map(|r| (0..cols).map(|j| (0..k).map(|t| r[t] * b[t][j]).sum()).collect())
        .collect()
}

pub fn as_tfidf(rows: Vec<Vec<f64>>) -> TfidfMatrix {
    let v = rows[0].len();
    TfidfMatrix {
        movie_order: ids(rows.len()),
        vocabulary: Vocabulary::new((0..v).map(|j| format!("w{j}")).collect()).unwrap(),
        rows,
    }
}

/// Singular values from nalgebra's full SVD, descending.
pub fn oracle_singular_values(rows: &[Vec<f64>]) -> Vec<f64> {
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    let mut s: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Best rank-K Frobenius error: the norm of the discarded singular values.
pub fn oracle_tail(rows: &[Vec<f64>], k: usize) -> f64 {
    oracle_singular_values(rows)[k..]
        .iter()
        .map(|s| s * s)
        .sum::<f64>()
        .sqrt()
}

pub fn matrix(values: Vec<f64>, n: usize) -> SimilarityMatrix {
    SimilarityMatrix::from_parts(values, ids(n), Provenance::Modality(Modality::Lda), vec![false; n]).unwrap()
}

/// Random symmetric similarity with unit diagonal; values drawn from a small
/// grid so that ties occur.
pub fn random_similarity(rng: &mut impl Rng, n: usize, levels: u32) -> SimilarityMatrix {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
        for j in i + 1..n {
            let x = rng.random_range(0..levels) as f64 / levels as f64;
            v[i * n + j] = x;
            v[j * n + i] = x;
        }
    }
    matrix(v, n)
}

/// Sort-based metrics: for each movie, sort the others by model similarity
/// (descending, id ascending), take the first, then find its 1-based position
/// in the list sorted by ground-truth similarity.
pub fn oracle_ranks(model: &SimilarityMatrix, gt: &SimilarityMatrix) -> Vec<usize> {
    let n = model.len();
    let ids = model.movie_order().to_vec();
    let sorted = |m: &SimilarityMatrix, i: usize| {
        let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        others.sort_by(|&a, &b| m.get(i, b).partial_cmp(&m.get(i, a)).unwrap().then(ids[a].cmp(&ids[b])));
        others
    };
    (0..n)
        .map(|i| {
            let rec = sorted(model, i)[0];
            sorted(gt, i).iter().position(|&j| j == rec).unwrap() + 1
        })
        .collect()
}

pub fn oracle_median(ranks: &[usize]) -> f64 {
    let mut r: Vec<f64> = ranks.iter().map(|&x| x as f64).collect();
    r.sort_by(f64::total_cmp);
    let n = r.len();
    if n % 2 == 1 {
        r[n / 2]
    } else {
        (r[n / 2 - 1] + r[n / 2]) / 2.0
    }
}

pub fn oracle_top10(ranks: &[usize]) -> f64 {
    ranks.iter().filter(|&&r| r <= 10).count() as f64 * 100.0 / ranks.len() as f64
}
