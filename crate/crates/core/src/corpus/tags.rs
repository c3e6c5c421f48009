use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tag-relevance descriptor of one movie. Relevances lie in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagVector {
    pub movie_id: String,
    pub tag_weights: BTreeMap<String, f64>,
}

impl TagVector {
    pub fn has_positive(&self) -> bool {
        self.tag_weights.values().any(|&w| w > 0.0)
    }
}

/// Sorted set of all tag strings across `tags`; its length is the tag-space dimension.
pub fn tag_space(tags: &[TagVector]) -> BTreeSet<&str> {
    tags.iter()
        .flat_map(|t| t.tag_weights.keys().map(String::as_str))
        .collect()
}

pub fn load_tags(path: impl AsRef<Path>) -> Result<Vec<TagVector>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_tags(&bytes)
}

/// Parses `movie_id,tag,relevance` CSV with a header row. One vector per
/// distinct movie id, in order of first appearance.
pub fn parse_tags(bytes: &[u8]) -> Result<Vec<TagVector>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);

    let mut out: Vec<TagVector> = Vec::new();
    let mut slot: HashMap<String, usize> = HashMap::new();
    for (i, record) in reader.records().enumerate() {
        // header is line 1
        let row = i + 2;
        let record = record.map_err(|e| Error::parse(format!("tags row {row}"), e.to_string()))?;
        if record.len() != 3 {
            return Err(Error::parse(
                format!("tags row {row}"),
                format!("expected 3 fields, found {}", record.len()),
            ));
        }
        let (movie, tag, rel) = (&record[0], &record[1], &record[2]);
        let relevance: f64 = rel
            .parse()
            .map_err(|_| Error::parse(format!("tags row {row}"), format!("non-numeric relevance {rel:?}")))?;
        if !(0.0..=1.0).contains(&relevance) {
            return Err(Error::Validation(format!(
                "tags row {row}: relevance {relevance} outside [0, 1]"
            )));
        }
        let idx = *slot.entry(movie.to_string()).or_insert_with(|| {
            out.push(TagVector {
                movie_id: movie.to_string(),
                tag_weights: BTreeMap::new(),
            });
            out.len() - 1
        });
        if out[idx].tag_weights.insert(tag.to_string(), relevance).is_some() {
            return Err(Error::Validation(format!(
                "tags row {row}: duplicate tag {tag:?} for movie {movie:?}"
            )));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_rows_by_movie() {
        let csv = "movie_id,tag,relevance\nm1,funny,0.9\nm1,dark,0.1\nm2,funny,0.2\n";
        let tags = parse_tags(csv.as_bytes()).unwrap();
        assert_eq!(tags.len(), 2);
        assert_eq!(tags[0].movie_id, "m1");
        assert_eq!(tags[0].tag_weights["dark"], 0.1);
        assert_eq!(tags[1].tag_weights.len(), 1);
        assert_eq!(tag_space(&tags).into_iter().collect::<Vec<_>>(), vec!["dark", "funny"]);
    }

    #[test]
    fn out_of_range_reports_row() {
        let csv = "movie_id,tag,relevance\nm2,sad,0.5\nm1,funny,1.5\n";
        let err = parse_tags(csv.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(err.to_string().contains("row 3"), "{err}");
    }

    #[test]
    fn non_numeric_is_parse_error() {
        let csv = "movie_id,tag,relevance\nm1,funny,lots\n";
        assert!(matches!(parse_tags(csv.as_bytes()), Err(Error::Parse { .. })));
    }

    #[test]
    fn empty_file_gives_empty_list() {
        assert!(parse_tags(b"").unwrap().is_empty());
        assert!(parse_tags(b"movie_id,tag,relevance\n").unwrap().is_empty());
    }

    proptest::proptest! {
        #[test]
        fn tag_space_counts_distinct_tags(rows in proptest::collection::vec((0u8..5, 0u8..20, 0.0f64..=1.0), 0..60)) {
            let mut csv = String::from("movie_id,tag,relevance\n");
            let mut seen = std::collections::HashSet::new();
            let mut distinct = BTreeSet::new();
            for (m, t, r) in rows {
                if seen.insert((m, t)) {
                    csv.push_str(&format!("m{m},t{t},{r}\n"));
                    distinct.insert(t);
                }
            }
            let tags = parse_tags(csv.as_bytes()).unwrap();
            proptest::prop_assert_eq!(tag_space(&tags).len(), distinct.len());
        }
    }
}
