//! One-vs-rest linear SVMs trained by seeded stochastic subgradient descent.
//!
//! Each class minimizes `lambda/2 |w|^2 + mean_i max(0, 1 - y_i (w.x_i + b))`
//! over standardized features. The bias is not regularized. Step size at
//! update `t` (from 1) is `1 / (lambda t + 1)`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::features::SegmentFeatures;
use super::taxonomy::{ClassTaxonomy, TaxonomyKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmConfig {
    pub epochs: usize,
    pub lambda: f64,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            epochs: 100,
            lambda: 1e-4,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSegment {
    pub label: String,
    pub features: Vec<f64>,
}

/// Per-dimension affine map to zero mean and unit variance. Constant
/// dimensions keep scale 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.len());
        if rows.is_empty() || dim == 0 {
            return Err(Error::Validation("cannot standardize an empty sample".into()));
        }
        let n = rows.len() as f64;
        let mut mean = vec![0.0; dim];
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.len(),
                });
            }
            mean.iter_mut().zip(r.iter()).for_each(|(m, x)| *m += x);
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; dim];
        for r in rows {
            for ((v, x), m) in var.iter_mut().zip(r.iter()).zip(&mean) {
                *v += (x - m).powi(2);
            }
        }
        let scale = var
            .into_iter()
            .map(|v| {
                let s = (v / n).sqrt();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Standardizer { mean, scale })
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((x, m), s)| (x - m) / s)
            .collect()
    }

    pub fn invert(&self, z: &[f64]) -> Vec<f64> {
        z.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((z, m), s)| z * s + m)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    /// `None` for models over an ad-hoc class list.
    pub taxonomy: Option<ClassTaxonomy>,
    pub classes: Vec<String>,
    pub feature_dim: usize,
    pub standardizer: Standardizer,
    /// One row per class.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub config: SvmConfig,
    /// Full-set objective per class, `epochs + 1` values starting at w = 0.
    pub objective_history: Vec<Vec<f64>>,
}

impl SvmModel {
    pub fn kind(&self) -> Option<TaxonomyKind> {
        self.taxonomy.as_ref().map(ClassTaxonomy::kind)
    }

    /// Decision value of every class for one raw feature vector.
    pub fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.feature_dim {
            return Err(Error::DimensionMismatch {
                expected: self.feature_dim,
                found: x.len(),
            });
        }
        let z = self.standardizer.apply(x);
        Ok(self
            .weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| dot(w, &z) + b)
            .collect())
    }

    /// Index of the best-scoring class; ties go to the earlier class.
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        let scores = self.scores(x)?;
        let mut best = 0;
        for (c, &s) in scores.iter().enumerate().skip(1) {
            if s > scores[best] {
                best = c;
            }
        }
        Ok(best)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `lambda/2 |w|^2 + mean hinge` over already-standardized rows.
pub fn svm_objective(w: &[f64], b: f64, xs: &[Vec<f64>], ys: &[f64], lambda: f64) -> f64 {
    let hinge: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (1.0 - y * (dot(w, x) + b)).max(0.0))
        .sum();
    0.5 * lambda * dot(w, w) + hinge / xs.len() as f64
}

/// Trains against one of the fixed taxonomies.
pub fn svm_train(data: &[LabeledSegment], taxonomy: &ClassTaxonomy, cfg: &SvmConfig) -> Result<SvmModel> {
    let mut model = svm_train_classes(data, taxonomy.labels(), cfg)?;
    model.taxonomy = Some(taxonomy.clone());
    Ok(model)
}

/// Trains against an arbitrary ordered class list (at least two classes).
pub fn svm_train_classes(data: &[LabeledSegment], classes: &[String], cfg: &SvmConfig) -> Result<SvmModel> {
    if classes.len() < 2 {
        return Err(Error::Parameter("an SVM needs at least two classes".into()));
    }
    if cfg.epochs == 0 || !(cfg.lambda > 0.0 && cfg.lambda.is_finite()) {
        return Err(Error::Parameter(format!(
            "SVM needs epochs >= 1 and lambda > 0 (got {} and {})",
            cfg.epochs, cfg.lambda
        )));
    }
    let mut targets = Vec::with_capacity(data.len());
    for (i, seg) in data.iter().enumerate() {
        let c = classes.iter().position(|c| *c == seg.label).ok_or_else(|| {
            Error::Validation(format!("training example {} has unknown label `{}`", i + 1, seg.label))
        })?;
        if seg.features.iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation(format!(
                "training example {} has a non-finite feature",
                i + 1
            )));
        }
        targets.push(c);
    }
    if let Some(missing) = (0..classes.len()).find(|c| !targets.contains(c)) {
        return Err(Error::Validation(format!(
            "no training examples for class `{}`",
            classes[missing]
        )));
    }
    let rows: Vec<&[f64]> = data.iter().map(|s| s.features.as_slice()).collect();
    let standardizer = Standardizer::fit(&rows)?;
    let xs: Vec<Vec<f64>> = rows.iter().map(|r| standardizer.apply(r)).collect();

    let per_class: Vec<(Vec<f64>, f64, Vec<f64>)> = (0..classes.len())
        .into_par_iter()
        .map(|c| {
            let ys: Vec<f64> = targets.iter().map(|&t| if t == c { 1.0 } else { -1.0 }).collect();
            train_binary(&xs, &ys, cfg, cfg.seed.wrapping_add(c as u64))
        })
        .collect();

    let mut model = SvmModel {
        taxonomy: None,
        classes: classes.to_vec(),
        feature_dim: standardizer.mean.len(),
        standardizer,
        weights: Vec::new(),
        bias: Vec::new(),
        config: *cfg,
        objective_history: Vec::new(),
    };
    for (w, b, hist) in per_class {
        model.weights.push(w);
        model.bias.push(b);
        model.objective_history.push(hist);
    }
    Ok(model)
}

fn train_binary(xs: &[Vec<f64>], ys: &[f64], cfg: &SvmConfig, seed: u64) -> (Vec<f64>, f64, Vec<f64>) {
    let dim = xs[0].len();
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..xs.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs + 1);
    history.push(svm_objective(&w, b, xs, ys, cfg.lambda));
    let mut t = 0u64;
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (cfg.lambda * t as f64 + 1.0);
            let margin = ys[i] * (dot(&w, &xs[i]) + b);
            let shrink = 1.0 - eta * cfg.lambda;
            w.iter_mut().for_each(|v| *v *= shrink);
            if margin < 1.0 {
                w.iter_mut().zip(&xs[i]).for_each(|(v, x)| *v += eta * ys[i] * x);
                b += eta * ys[i];
            }
        }
        history.push(svm_objective(&w, b, xs, ys, cfg.lambda));
    }
    (w, b, history)
}

/// Taxonomy label of each segment, in order.
pub fn classify_segments(model: &SvmModel, feats: &SegmentFeatures) -> Result<Vec<String>> {
    if feats.dim != model.feature_dim {
        return Err(Error::DimensionMismatch {
            expected: model.feature_dim,
            found: feats.dim,
        });
    }
    feats
        .segments
        .iter()
        .map(|s| model.predict(s).map(|c| model.classes[c].clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn blobs(centers: &[(&str, [f64; 2])], per: usize, seed: u64) -> Vec<LabeledSegment> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        for (label, c) in centers {
            for _ in 0..per {
                let r = rng.random::<f64>().sqrt();
                let a = rng.random::<f64>() * std::f64::consts::TAU;
                out.push(LabeledSegment {
                    label: label.to_string(),
                    features: vec![c[0] + r * a.cos(), c[1] + r * a.sin()],
                });
            }
        }
        out
    }

    fn classes(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn separable_blobs() {
        let data = blobs(&[("a", [0.0, 0.0]), ("b", [10.0, 10.0])], 50, 7);
        let model = svm_train_classes(&data, &classes(&["a", "b"]), &SvmConfig::default()).unwrap();
        for s in &data {
            assert_eq!(model.classes[model.predict(&s.features).unwrap()], s.label);
        }
        assert_eq!(model.predict(&[10.0, 10.0]).unwrap(), 1);
        for h in &model.objective_history {
            assert_eq!(h[0], 1.0);
            assert!(h.last().unwrap() <= &h[0]);
        }
    }

    #[test]
    fn full_taxonomy_on_a_circle() {
        let t = ClassTaxonomy::genre();
        let centers: Vec<(&str, [f64; 2])> = t
            .labels()
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let a = i as f64 * std::f64::consts::TAU / 8.0;
                (l.as_str(), [20.0 * a.cos(), 20.0 * a.sin()])
            })
            .collect();
        let data = blobs(&centers, 30, 3);
        let model = svm_train(&data, &t, &SvmConfig::default()).unwrap();
        assert_eq!(model.kind(), Some(TaxonomyKind::Genre));
        let correct = data
            .iter()
            .filter(|s| model.classes[model.predict(&s.features).unwrap()] == s.label)
            .count();
        assert_eq!(correct, data.len());
    }

    #[test]
    fn deterministic() {
        let data = blobs(&[("a", [0.0, 0.0]), ("b", [3.0, 1.0])], 40, 1);
        let cfg = SvmConfig {
            seed: 11,
            ..SvmConfig::default()
        };
        let a = svm_train_classes(&data, &classes(&["a", "b"]), &cfg).unwrap();
        let b = svm_train_classes(&data, &classes(&["a", "b"]), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn missing_class_named() {
        let data = blobs(&[("blues", [0.0, 0.0]), ("rock", [5.0, 5.0])], 5, 1);
        let err = svm_train(&data, &ClassTaxonomy::genre(), &SvmConfig::default()).unwrap_err();
        assert!(err.to_string().contains("`classical`"), "{err}");
        assert!(svm_train_classes(&data, &classes(&["blues"]), &SvmConfig::default()).is_err());
    }

    #[test]
    fn ties_and_dimensions() {
        let model = SvmModel {
            taxonomy: Some(ClassTaxonomy::event()),
            classes: ClassTaxonomy::event().labels().to_vec(),
            feature_dim: 2,
            standardizer: Standardizer {
                mean: vec![0.0; 2],
                scale: vec![1.0; 2],
            },
            weights: vec![vec![0.0; 2]; 8],
            bias: vec![0.5; 8],
            config: SvmConfig::default(),
            objective_history: vec![],
        };
        let feats = SegmentFeatures::new("m", 2, vec![vec![1.0, 2.0]]).unwrap();
        assert_eq!(classify_segments(&model, &feats).unwrap(), vec!["music"]);
        let empty = SegmentFeatures::new("m", 2, vec![]).unwrap();
        assert!(classify_segments(&model, &empty).unwrap().is_empty());
        let wrong = SegmentFeatures::new("m", 3, vec![]).unwrap();
        assert!(matches!(
            classify_segments(&model, &wrong),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    proptest::proptest! {
        #[test]
        fn standardize_roundtrip(rows in proptest::collection::vec(proptest::collection::vec(-1e3f64..1e3, 4), 1..30)) {
            let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
            let s = Standardizer::fit(&refs).unwrap();
            for r in &rows {
                let back = s.invert(&s.apply(r));
                for (a, b) in back.iter().zip(r) {
                    proptest::prop_assert!((a - b).abs() <= 1e-9);
                }
            }
        }
    }
}
