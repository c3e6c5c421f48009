//! Latent Dirichlet Allocation fitted by collapsed Gibbs sampling.
//!
//! Each token's topic is resampled from its full conditional with the
//! document-topic and topic-word multinomials integrated out:
//!
//! ```text
//! p(z = t | rest) ∝ (n_dt + alpha) * (n_tw + beta) / (n_t + V * beta)
//! ```
//!
//! where every count excludes the token being resampled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{BowCorpus, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig {
    pub topics: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
    /// Average the estimates of the final `average_last` sweeps instead of
    /// using the last sample alone. 0 disables averaging.
    #[serde(default)]
    pub average_last: usize,
}

impl LdaConfig {
    /// Conventional collapsed-Gibbs defaults: alpha = 50/T, beta = 0.01, 1000 sweeps.
    pub fn with_topics(topics: usize) -> Self {
        LdaConfig {
            topics,
            alpha: 50.0 / topics as f64,
            beta: 0.01,
            iterations: 1000,
            seed: 0,
            average_last: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.topics < 1 {
            return Err(Error::Parameter("LDA needs at least one topic".into()));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) || !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::Parameter(format!(
                "LDA priors must be positive (alpha={}, beta={})",
                self.alpha, self.beta
            )));
        }
        if self.iterations < 1 {
            return Err(Error::Parameter("LDA needs at least one sweep".into()));
        }
        if self.average_last > self.iterations {
            return Err(Error::Parameter(format!(
                "cannot average {} sweeps out of {}",
                self.average_last, self.iterations
            )));
        }
        Ok(())
    }
}

impl Default for LdaConfig {
    fn default() -> Self {
        LdaConfig::with_topics(55)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SampleAverage {
    samples: usize,
    theta: Vec<Vec<f64>>,
    phi: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaModel {
    pub num_topics: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub rng_seed: u64,
    pub vocabulary: Vocabulary,
    pub movie_order: Vec<String>,
    /// T x V.
    pub topic_word_counts: Vec<Vec<u32>>,
    /// D x T.
    pub doc_topic_counts: Vec<Vec<u32>>,
    pub topic_totals: Vec<u64>,
    /// Topic of every token, documents expanded in ascending column order.
    pub assignments: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    average: Option<SampleAverage>,
}

impl LdaModel {
    pub fn num_docs(&self) -> usize {
        self.doc_topic_counts.len()
    }

    pub fn num_terms(&self) -> usize {
        self.vocabulary.len()
    }

    /// Checks the count identities against the current assignments.
    pub fn check_invariants(&self) -> Result<()> {
        let t = self.num_topics;
        for (topic, row) in self.topic_word_counts.iter().enumerate() {
            let sum: u64 = row.iter().map(|&c| c as u64).sum();
            if sum != self.topic_totals[topic] {
                return Err(Error::Validation(format!(
                    "topic {topic}: total {} != word-count sum {sum}",
                    self.topic_totals[topic]
                )));
            }
        }
        for (d, (row, z)) in self.doc_topic_counts.iter().zip(&self.assignments).enumerate() {
            let sum: usize = row.iter().map(|&c| c as usize).sum();
            if sum != z.len() {
                return Err(Error::Validation(format!(
                    "document {d}: topic counts sum {sum} != {} tokens",
                    z.len()
                )));
            }
            if let Some(bad) = z.iter().find(|&&k| k as usize >= t) {
                return Err(Error::Validation(format!(
                    "document {d}: assignment {bad} out of range"
                )));
            }
        }
        Ok(())
    }

    fn phi_row(&self, topic: usize) -> Vec<f64> {
        if let Some(avg) = &self.average {
            return avg.phi[topic].clone();
        }
        let v = self.num_terms() as f64;
        let denom = self.topic_totals[topic] as f64 + v * self.beta;
        self.topic_word_counts[topic]
            .iter()
            .map(|&c| (c as f64 + self.beta) / denom)
            .collect()
    }

    fn theta_row(&self, d: usize) -> Vec<f64> {
        if let Some(avg) = &self.average {
            return avg.theta[d].clone();
        }
        let t = self.num_topics as f64;
        let tokens = self.assignments[d].len() as f64;
        let denom = tokens + t * self.alpha;
        self.doc_topic_counts[d]
            .iter()
            .map(|&c| (c as f64 + self.alpha) / denom)
            .collect()
    }

    /// Topic-word distribution of `topic`.
    pub fn topic_word_distribution(&self, topic: usize) -> Result<Vec<f64>> {
        if topic >= self.num_topics {
            return Err(Error::Parameter(format!(
                "topic {topic} out of range (model has {})",
                self.num_topics
            )));
        }
        Ok(self.phi_row(topic))
    }
}

/// Sampler state while fitting; counts laid out word-major for locality.
struct Sampler {
    t: usize,
    v: usize,
    alpha: f64,
    beta: f64,
    words: Vec<Vec<u32>>,
    z: Vec<Vec<u32>>,
    ndt: Vec<Vec<u32>>,
    nwt: Vec<u32>,
    nt: Vec<u64>,
    weights: Vec<f64>,
}

impl Sampler {
    fn sweep(&mut self, rng: &mut ChaCha8Rng) {
        let t = self.t;
        let vbeta = self.v as f64 * self.beta;
        for d in 0..self.words.len() {
            for i in 0..self.words[d].len() {
                let w = self.words[d][i] as usize;
                let old = self.z[d][i] as usize;
                self.ndt[d][old] -= 1;
                self.nwt[w * t + old] -= 1;
                self.nt[old] -= 1;

                let word_counts = &self.nwt[w * t..(w + 1) * t];
                let doc_counts = &self.ndt[d];
                let mut total = 0.0;
                for k in 0..t {
                    total += (doc_counts[k] as f64 + self.alpha) * (word_counts[k] as f64 + self.beta)
                        / (self.nt[k] as f64 + vbeta);
                    self.weights[k] = total;
                }
                let u = rng.random::<f64>() * total;
                let new = self.weights.partition_point(|&c| c <= u).min(t - 1);

                self.z[d][i] = new as u32;
                self.ndt[d][new] += 1;
                self.nwt[w * t + new] += 1;
                self.nt[new] += 1;
            }
        }
    }

    fn snapshot(&self, vocabulary: &Vocabulary, movie_order: &[String], cfg: &LdaConfig) -> LdaModel {
        let topic_word_counts = (0..self.t)
            .map(|k| (0..self.v).map(|w| self.nwt[w * self.t + k]).collect())
            .collect();
        LdaModel {
            num_topics: self.t,
            alpha: self.alpha,
            beta: self.beta,
            iterations: cfg.iterations,
            rng_seed: cfg.seed,
            vocabulary: vocabulary.clone(),
            movie_order: movie_order.to_vec(),
            topic_word_counts,
            doc_topic_counts: self.ndt.clone(),
            topic_totals: self.nt.clone(),
            assignments: self.z.clone(),
            average: None,
        }
    }
}

pub fn lda_fit(bow: &BowCorpus, cfg: &LdaConfig) -> Result<LdaModel> {
    lda_fit_with(bow, cfg, |_, _| Ok(()))
}

/// Like [`lda_fit`], handing the model state to `observe` after every sweep.
pub fn lda_fit_with<F>(bow: &BowCorpus, cfg: &LdaConfig, mut observe: F) -> Result<LdaModel>
where
    F: FnMut(usize, &LdaModel) -> Result<()>,
{
    cfg.validate()?;
    if bow.num_docs() == 0 {
        return Err(Error::Parameter("LDA needs a non-empty corpus".into()));
    }
    let t = cfg.topics;
    let v = bow.num_terms();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let words: Vec<Vec<u32>> = bow
        .counts
        .iter()
        .map(|row| {
            row.iter()
                .flat_map(|(&w, &c)| std::iter::repeat_n(w as u32, c as usize))
                .collect()
        })
        .collect();
    let mut sampler = Sampler {
        t,
        v,
        alpha: cfg.alpha,
        beta: cfg.beta,
        z: Vec::with_capacity(words.len()),
        ndt: vec![vec![0; t]; words.len()],
        nwt: vec![0; v * t],
        nt: vec![0; t],
        weights: vec![0.0; t],
        words: Vec::new(),
    };
    for (d, doc) in words.iter().enumerate() {
        let mut zd = Vec::with_capacity(doc.len());
        for &w in doc {
            let k = rng.random_range(0..t);
            zd.push(k as u32);
            sampler.ndt[d][k] += 1;
            sampler.nwt[w as usize * t + k] += 1;
            sampler.nt[k] += 1;
        }
        sampler.z.push(zd);
    }
    sampler.words = words;

    let mut average: Option<SampleAverage> = None;
    for sweep in 0..cfg.iterations {
        sampler.sweep(&mut rng);
        let model = sampler.snapshot(&bow.vocabulary, &bow.movie_order, cfg);
        observe(sweep, &model)?;
        if cfg.average_last > 0 && sweep + cfg.average_last >= cfg.iterations {
            let acc = average.get_or_insert_with(|| SampleAverage {
                samples: 0,
                theta: vec![vec![0.0; t]; model.num_docs()],
                phi: vec![vec![0.0; v]; t],
            });
            acc.samples += 1;
            for (d, row) in acc.theta.iter_mut().enumerate() {
                row.iter_mut().zip(model.theta_row(d)).for_each(|(a, x)| *a += x);
            }
            for (k, row) in acc.phi.iter_mut().enumerate() {
                row.iter_mut().zip(model.phi_row(k)).for_each(|(a, x)| *a += x);
            }
        }
    }

    let mut model = sampler.snapshot(&bow.vocabulary, &bow.movie_order, cfg);
    if let Some(mut acc) = average {
        let n = acc.samples as f64;
        acc.theta.iter_mut().flatten().for_each(|x| *x /= n);
        acc.phi.iter_mut().flatten().for_each(|x| *x /= n);
        model.average = Some(acc);
    }
    Ok(model)
}

/// Per-movie topic proportions.
pub fn lda_doc_topics(model: &LdaModel) -> Vec<Vec<f64>> {
    (0..model.num_docs()).map(|d| model.theta_row(d)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicSummary {
    pub topic_id: usize,
    pub top_words: Vec<TopWord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopWord {
    pub word: String,
    pub probability: f64,
}

/// The `n` most probable words of `topic`, ties broken lexicographically.
pub fn topic_top_words(model: &LdaModel, topic: usize, n: usize) -> Result<TopicSummary> {
    if n < 1 {
        return Err(Error::Parameter("need at least one word per topic".into()));
    }
    let phi = model.topic_word_distribution(topic)?;
    let terms = model.vocabulary.terms();
    let mut order: Vec<usize> = (0..phi.len()).collect();
    order.sort_by(|&a, &b| phi[b].total_cmp(&phi[a]).then_with(|| terms[a].cmp(&terms[b])));
    Ok(TopicSummary {
        topic_id: topic,
        top_words: order
            .into_iter()
            .take(n)
            .map(|w| TopWord {
                word: terms[w].clone(),
                probability: phi[w],
            })
            .collect(),
    })
}
