use std::collections::{BTreeMap, BTreeSet};

use super::{Modality, ModalityVectors};
use crate::corpus::MovieRecord;
use crate::error::{Error, Result};

/// Binary one-hot vectors over cast, directors and genres. Columns are sorted
/// within each block; blocks appear in that order.
pub fn metadata_vectors(records: &[MovieRecord]) -> Result<ModalityVectors> {
    if records.is_empty() {
        return Err(Error::Parameter("metadata vectors need at least one movie".into()));
    }
    let blocks: [fn(&MovieRecord) -> &BTreeSet<String>; 3] = [|r| &r.cast, |r| &r.directors, |r| &r.genres];

    let mut columns: Vec<BTreeMap<&str, usize>> = Vec::with_capacity(3);
    let mut offset = 0;
    for block in blocks {
        let values: BTreeSet<&str> = records
            .iter()
            .flat_map(|r| block(r).iter().map(String::as_str))
            .collect();
        let index = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, offset + i))
            .collect::<BTreeMap<_, _>>();
        offset += index.len();
        columns.push(index);
    }

    let vectors = records
        .iter()
        .map(|r| {
            let mut v = vec![0.0; offset];
            for (block, index) in blocks.iter().zip(&columns) {
                for value in block(r) {
                    v[index[value.as_str()]] = 1.0;
                }
            }
            v
        })
        .collect();
    ModalityVectors::new(
        Modality::Metadata,
        records.iter().map(|r| r.id.clone()).collect(),
        vectors,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::similarity_matrix;

    fn rec(id: &str, cast: &[&str], directors: &[&str], genres: &[&str]) -> MovieRecord {
        let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        MovieRecord {
            id: id.into(),
            title: id.to_uppercase(),
            cast: set(cast),
            directors: set(directors),
            genres: set(genres),
        }
    }

    #[test]
    fn shared_genre_overlap() {
        let mv = metadata_vectors(&[rec("a", &[], &[], &["drama", "war"]), rec("b", &[], &[], &["drama"])]).unwrap();
        assert_eq!(mv.dim(), 2);
        let overlap: f64 = mv.vectors[0].iter().zip(&mv.vectors[1]).map(|(x, y)| x * y).sum();
        assert_eq!(overlap, 1.0);
    }

    #[test]
    fn block_order_and_dimension() {
        let mv = metadata_vectors(&[
            rec("a", &["zoe", "al"], &["kurosawa"], &["drama"]),
            rec("b", &["al"], &["al"], &["anime"]),
        ])
        .unwrap();
        // cast {al, zoe} | directors {al, kurosawa} | genres {anime, drama}
        assert_eq!(mv.dim(), 6);
        assert_eq!(mv.vectors[0], vec![1.0, 1.0, 0.0, 1.0, 0.0, 1.0]);
        assert_eq!(mv.vectors[1], vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        assert!(mv.vectors.iter().flatten().all(|&x| x == 0.0 || x == 1.0));
    }

    #[test]
    fn empty_metadata_flagged() {
        let mv = metadata_vectors(&[rec("a", &[], &[], &[]), rec("b", &["x"], &[], &[])]).unwrap();
        assert_eq!(mv.flagged, vec![true, false]);
    }

    #[test]
    fn identical_metadata_cosine_one() {
        let mv = metadata_vectors(&[
            rec("a", &["x"], &["d"], &["g"]),
            rec("b", &["x"], &["d"], &["g"]),
            rec("c", &["y"], &["e"], &["h"]),
        ])
        .unwrap();
        let m = similarity_matrix(&mv).unwrap();
        assert_eq!(m.get(0, 1), 1.0);
        assert_eq!(m.get(0, 2), 0.0);
    }

    #[test]
    fn empty_records_rejected() {
        assert!(metadata_vectors(&[]).is_err());
    }
}
