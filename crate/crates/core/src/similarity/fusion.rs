use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Modality, Provenance, SimilarityMatrix};
use crate::error::{Error, Result};
use crate::eval::{evaluate, EvalReport};

const SUM_TOLERANCE: f64 = 1e-12;

/// Non-negative per-modality weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FusionWeights(BTreeMap<Modality, f64>);

impl FusionWeights {
    pub fn new(weights: BTreeMap<Modality, f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Parameter("fusion weights are empty".into()));
        }
        if let Some((m, w)) = weights.iter().find(|(_, w)| !w.is_finite() || **w < 0.0) {
            return Err(Error::Parameter(format!(
                "weight for {m} must be non-negative, got {w}"
            )));
        }
        let sum: f64 = weights.values().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::Parameter(format!("fusion weights sum to {sum}, expected 1")));
        }
        Ok(FusionWeights(weights))
    }

    /// Scales arbitrary non-negative weights to sum to one.
    pub fn normalized(raw: BTreeMap<Modality, f64>) -> Result<Self> {
        if let Some((m, w)) = raw.iter().find(|(_, w)| !w.is_finite() || **w < 0.0) {
            return Err(Error::Parameter(format!(
                "weight for {m} must be non-negative, got {w}"
            )));
        }
        let sum: f64 = raw.values().sum();
        if sum <= 0.0 {
            return Err(Error::Parameter("at least one weight must be positive".into()));
        }
        let mut scaled: BTreeMap<Modality, f64> = raw.into_iter().map(|(m, w)| (m, w / sum)).collect();
        // absorb rounding into the largest weight so the sum check holds
        let drift = 1.0 - scaled.values().sum::<f64>();
        if let Some(w) = scaled.values_mut().max_by(|a, b| a.total_cmp(b)) {
            *w += drift;
        }
        FusionWeights::new(scaled)
    }

    pub fn single(modality: Modality) -> Self {
        FusionWeights(BTreeMap::from([(modality, 1.0)]))
    }

    pub fn get(&self, modality: Modality) -> f64 {
        self.0.get(&modality).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Modality, f64)> + '_ {
        self.0.iter().map(|(m, w)| (*m, *w))
    }

    pub fn active(&self) -> impl Iterator<Item = (Modality, f64)> + '_ {
        self.iter().filter(|(_, w)| *w > 0.0)
    }

    /// Model label in the `MD + LSI + A` style, metadata first.
    pub fn label(&self) -> String {
        let order = [
            Modality::Metadata,
            Modality::Tfidf,
            Modality::Lsi,
            Modality::Lda,
            Modality::AudioEvent,
            Modality::AudioGenre,
        ];
        let active: Vec<Modality> = order.into_iter().filter(|m| self.get(*m) > 0.0).collect();
        if let [only] = active.as_slice() {
            return only.display_name().to_string();
        }
        active.iter().map(|m| m.abbreviation()).collect::<Vec<_>>().join(" + ")
    }
}

impl fmt::Display for FusionWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(m, w)| format!("{m}={w}")).collect();
        f.write_str(&parts.join(","))
    }
}

/// Parses `lda=0.3,metadata=0.7` (or `lda:0.3,...`) into raw weights.
pub fn parse_weight_list(s: &str) -> Result<BTreeMap<Modality, f64>> {
    let mut out = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = part
            .split_once(['=', ':'])
            .ok_or_else(|| Error::Parameter(format!("weight {part:?} is not modality=value")))?;
        let modality: Modality = name.parse()?;
        let weight: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Parameter(format!("weight {value:?} for {modality} is not a number")))?;
        if out.insert(modality, weight).is_some() {
            return Err(Error::Parameter(format!("modality {modality} given twice")));
        }
    }
    if out.is_empty() {
        return Err(Error::Parameter("no weights given".into()));
    }
    Ok(out)
}

/// Element-wise weighted sum of modality matrices.
pub fn fuse(matrices: &BTreeMap<Modality, SimilarityMatrix>, weights: &FusionWeights) -> Result<SimilarityMatrix> {
    let mut parts = Vec::new();
    for (m, w) in weights.iter() {
        let matrix = matrices
            .get(&m)
            .ok_or_else(|| Error::Parameter(format!("no similarity matrix for modality {m}")))?;
        parts.push((matrix, w));
    }
    let (first, _) = parts[0];
    if let Some((bad, _)) = parts.iter().find(|(mx, _)| mx.movie_order() != first.movie_order()) {
        return Err(Error::Validation(format!(
            "movie order mismatch between fused matrices ({:?})",
            bad.provenance()
        )));
    }

    let n = first.len();
    let mut values = vec![0.0; n * n];
    for (matrix, w) in &parts {
        if *w == 0.0 {
            continue;
        }
        for (acc, v) in values.iter_mut().zip(matrix.values()) {
            *acc += w * v;
        }
    }
    let flagged = (0..n)
        .map(|i| parts.iter().filter(|(_, w)| *w > 0.0).all(|(mx, _)| mx.is_flagged(i)))
        .collect();
    SimilarityMatrix::from_parts(
        values,
        first.movie_order().to_vec(),
        Provenance::Fusion(weights.clone()),
        flagged,
    )
}

/// All ways of splitting `1/step` units over `parts` modalities.
pub fn simplex_grid(parts: usize, step: f64) -> Result<Vec<Vec<u32>>> {
    if parts == 0 {
        return Err(Error::Parameter("weight search needs at least one modality".into()));
    }
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::Parameter(format!("grid step {step} must lie in (0, 1]")));
    }
    let units = (1.0 / step).round();
    if ((1.0 / step) - units).abs() > 1e-9 {
        return Err(Error::Parameter(format!("grid step {step} does not divide 1")));
    }
    let units = units as u32;
    let mut out = Vec::new();
    let mut current = vec![0u32; parts];
    fn fill(slot: usize, left: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slot + 1 == current.len() {
            current[slot] = left;
            out.push(current.clone());
            return;
        }
        for take in (0..=left).rev() {
            current[slot] = take;
            fill(slot + 1, left - take, current, out);
        }
    }
    fill(0, units, &mut current, &mut out);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSearch {
    pub weights: FusionWeights,
    pub report: EvalReport,
    pub candidates_evaluated: usize,
}

/// Exhaustive simplex grid search. Minimizes median first-recommendation
/// rank, then maximizes top-10 percentage, then prefers the lexicographically
/// greatest weight vector in modality order.
pub fn search_weights(
    matrices: &BTreeMap<Modality, SimilarityMatrix>,
    ground_truth: Option<&SimilarityMatrix>,
    step: f64,
) -> Result<WeightSearch> {
    let gt = ground_truth.ok_or_else(|| Error::NoGroundTruth("weight search requires tag ground truth".into()))?;
    let modalities: Vec<Modality> = matrices.keys().copied().collect();
    let grid = simplex_grid(modalities.len(), step)?;
    let units: u32 = grid[0].iter().sum();

    let scored: Vec<(Vec<u32>, FusionWeights, EvalReport)> = grid
        .into_par_iter()
        .map(|point| {
            let weights = FusionWeights::new(
                modalities
                    .iter()
                    .zip(&point)
                    .map(|(m, &u)| (*m, u as f64 / units as f64))
                    .collect(),
            )?;
            let fused = fuse(matrices, &weights)?;
            let report = evaluate(&weights.label(), &fused, gt)?;
            Ok((point, weights, report))
        })
        .collect::<Result<_>>()?;

    let candidates_evaluated = scored.len();
    let (_, weights, report) = scored
        .into_iter()
        .min_by(|a, b| compare_candidates((&a.0, &a.2), (&b.0, &b.2)))
        .expect("grid is never empty");
    Ok(WeightSearch {
        weights,
        report,
        candidates_evaluated,
    })
}

fn compare_candidates(a: (&Vec<u32>, &EvalReport), b: (&Vec<u32>, &EvalReport)) -> Ordering {
    a.1.median_first_rec_rank
        .total_cmp(&b.1.median_first_rec_rank)
        .then_with(|| b.1.top10_pct.total_cmp(&a.1.top10_pct))
        .then_with(|| b.0.cmp(a.0))
}
