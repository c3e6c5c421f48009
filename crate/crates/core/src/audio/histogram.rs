use serde::{Deserialize, Serialize};

use super::taxonomy::{ClassTaxonomy, TaxonomyKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassHistogram {
    pub movie_id: String,
    pub kind: TaxonomyKind,
    /// In taxonomy order.
    pub proportions: Vec<f64>,
    /// No segments: all proportions are zero.
    pub flagged: bool,
}

impl ClassHistogram {
    pub fn empty(movie_id: impl Into<String>, kind: TaxonomyKind) -> Self {
        ClassHistogram {
            movie_id: movie_id.into(),
            kind,
            proportions: vec![0.0; kind.labels().len()],
            flagged: true,
        }
    }
}

pub fn class_histogram<S: AsRef<str>>(
    movie_id: &str,
    labels: &[S],
    taxonomy: &ClassTaxonomy,
) -> Result<ClassHistogram> {
    let mut counts = vec![0usize; taxonomy.len()];
    for (i, label) in labels.iter().enumerate() {
        let label = label.as_ref();
        let c = taxonomy.index_of(label).ok_or_else(|| {
            Error::Validation(format!(
                "{movie_id}: label {} `{label}` is not in the {} taxonomy",
                i + 1,
                taxonomy.kind()
            ))
        })?;
        counts[c] += 1;
    }
    if labels.is_empty() {
        return Ok(ClassHistogram::empty(movie_id, taxonomy.kind()));
    }
    let total = labels.len() as f64;
    Ok(ClassHistogram {
        movie_id: movie_id.to_string(),
        kind: taxonomy.kind(),
        proportions: counts.iter().map(|&c| c as f64 / total).collect(),
        flagged: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_events() {
        let h = class_histogram("m", &["music", "music", "speech", "gunshots"], &ClassTaxonomy::event()).unwrap();
        assert_eq!(h.proportions, vec![0.5, 0.25, 0.0, 0.0, 0.0, 0.25, 0.0, 0.0]);
        assert!(!h.flagged);
    }

    #[test]
    fn empty_is_flagged_zero() {
        let h = class_histogram::<&str>("m", &[], &ClassTaxonomy::genre()).unwrap();
        assert!(h.flagged);
        assert_eq!(h.proportions, vec![0.0; 8]);
    }

    #[test]
    fn single_label_repeated() {
        let h = class_histogram("m", &["jazz"; 7], &ClassTaxonomy::genre()).unwrap();
        assert_eq!(h.proportions[4], 1.0);
        assert_eq!(h.proportions.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn unknown_label() {
        let err = class_histogram("m", &["rock", "polka"], &ClassTaxonomy::genre()).unwrap_err();
        assert!(err.to_string().contains("polka"));
    }

    proptest::proptest! {
        #[test]
        fn sums_to_one(idx in proptest::collection::vec(0usize..8, 1..500)) {
            let t = ClassTaxonomy::event();
            let labels: Vec<&str> = idx.iter().map(|&i| t.labels()[i].as_str()).collect();
            let h = class_histogram("m", &labels, &t).unwrap();
            proptest::prop_assert!((h.proportions.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            proptest::prop_assert!(h.proportions.iter().all(|&p| p >= 0.0));
        }
    }
}
