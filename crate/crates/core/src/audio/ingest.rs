//! Precomputed audio inputs.
//!
//! * feature CSV: header `f1,f2,...,fN`, one row per long-term segment;
//! * label file: one taxonomy label per line, blank lines ignored;
//! * training directory: one feature CSV per class, named `<label>.csv`.

use std::path::Path;

use super::features::SegmentFeatures;
use super::svm::LabeledSegment;
use super::taxonomy::{taxonomy_of_label, ClassTaxonomy, TaxonomyKind};
use crate::error::{Error, Result};

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn load_feature_csv(path: &Path, movie_id: &str) -> Result<SegmentFeatures> {
    parse_feature_csv(&read(path)?, movie_id, &path.display().to_string())
}

/// `source` names the input in error messages.
pub fn parse_feature_csv(bytes: &[u8], movie_id: &str, source: &str) -> Result<SegmentFeatures> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let header = reader
        .headers()
        .map_err(|e| Error::parse(format!("{source}:1"), e.to_string()))?
        .clone();
    if header.is_empty() || header.iter().all(str::is_empty) {
        return Err(Error::Validation(format!("{source}: empty feature file")));
    }
    for (i, name) in header.iter().enumerate() {
        if name != format!("f{}", i + 1) {
            return Err(Error::parse(
                format!("{source}:1"),
                format!("column {} header is `{name}`, expected `f{}`", i + 1, i + 1),
            ));
        }
    }
    let dim = header.len();
    let mut segments = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::Validation(format!("{source}:{line}: {e}"))
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != dim {
            return Err(Error::Validation(format!(
                "{source}:{line}: {} fields, header has {dim}",
                record.len()
            )));
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(c, field)| {
                let v: f64 = field.parse().map_err(|_| {
                    Error::Validation(format!("{source}:{line}: column f{} `{field}` is not a number", c + 1))
                })?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Validation(format!(
                        "{source}:{line}: column f{} is not finite",
                        c + 1
                    )))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        segments.push(row);
    }
    if segments.is_empty() {
        return Err(Error::Validation(format!("{source}: no segments")));
    }
    SegmentFeatures::new(movie_id, dim, segments)
}

fn label_lines(bytes: &[u8], source: &str) -> Result<Vec<(usize, String)>> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Encoding {
        offset: e.valid_up_to(),
    })?;
    Ok(text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim().to_string()))
        .filter(|(_, l)| !l.is_empty())
        .inspect(|(n, l)| tracing::trace!(source, line = n, label = %l))
        .collect())
}

/// Labels of a single taxonomy.
pub fn parse_label_file(bytes: &[u8], taxonomy: &ClassTaxonomy, source: &str) -> Result<Vec<String>> {
    label_lines(bytes, source)?
        .into_iter()
        .map(|(n, l)| {
            if taxonomy.index_of(&l).is_some() {
                Ok(l)
            } else {
                Err(Error::Validation(format!(
                    "{source}:{n}: `{l}` is not a {} label",
                    taxonomy.kind()
                )))
            }
        })
        .collect()
}

pub fn load_label_file(path: &Path, taxonomy: &ClassTaxonomy) -> Result<Vec<String>> {
    parse_label_file(&read(path)?, taxonomy, &path.display().to_string())
}

/// Labels from both taxonomies in one file, split by which list each belongs to.
/// Returns `(genre, event)`.
pub fn parse_mixed_labels(bytes: &[u8], source: &str) -> Result<(Vec<String>, Vec<String>)> {
    let mut genre = Vec::new();
    let mut event = Vec::new();
    for (n, l) in label_lines(bytes, source)? {
        match taxonomy_of_label(&l) {
            Some(TaxonomyKind::Genre) => genre.push(l),
            Some(TaxonomyKind::Event) => event.push(l),
            None => {
                return Err(Error::Validation(format!(
                    "{source}:{n}: `{l}` is neither a genre nor an event label"
                )))
            }
        }
    }
    Ok((genre, event))
}

/// Reads `<label>.csv` for every label present in `dir`. Other files are ignored.
pub fn load_training_dir(dir: &Path, taxonomy: &ClassTaxonomy) -> Result<Vec<LabeledSegment>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("csv") {
            continue;
        }
        let Some(label) = path.file_stem().and_then(|s| s.to_str()).map(str::to_string) else {
            continue;
        };
        if taxonomy.index_of(&label).is_none() {
            return Err(Error::Validation(format!(
                "{}: `{label}` is not a {} label",
                path.display(),
                taxonomy.kind()
            )));
        }
        files.push((label, path));
    }
    files.sort();
    let mut out = Vec::new();
    for (label, path) in files {
        let feats = load_feature_csv(&path, &label)?;
        out.extend(feats.segments.into_iter().map(|features| LabeledSegment {
            label: label.clone(),
            features,
        }));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_rows() {
        let csv = "f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,f11,f12\n\
                   1,2,3,4,5,6,7,8,9,10,11,12\n\
                   0,0,0,0,0,0,0,0,0,0,0,0\n\
                   1e-3,2,3,4,5,6,7,8,9,10,11,-1\n";
        let f = parse_feature_csv(csv.as_bytes(), "m", "x.csv").unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.dim, 12);
        assert_eq!(f.segments[2][0], 1e-3);
    }

    #[test]
    fn csv_errors_carry_lines() {
        let cases = [
            ("f1,f2\n1,2\n3\n", "x.csv:3"),
            ("f1,f2\n1,NaN\n", "x.csv:2"),
            ("f1,f2\n1,abc\n", "x.csv:2"),
            ("f1,g2\n1,2\n", "x.csv:1"),
            ("f1,f2\n", "no segments"),
            ("", "empty"),
        ];
        for (input, needle) in cases {
            let err = parse_feature_csv(input.as_bytes(), "m", "x.csv")
                .unwrap_err()
                .to_string();
            assert!(err.contains(needle), "{input:?}: {err}");
        }
    }

    #[test]
    fn label_file_names_line() {
        let err = parse_label_file(b"rock\n\njazz\npolka\n", &ClassTaxonomy::genre(), "l.txt").unwrap_err();
        assert!(err.to_string().contains("l.txt:4"), "{err}");
        assert!(err.to_string().contains("polka"));
        let ok = parse_label_file(b"rock\r\n jazz \n", &ClassTaxonomy::genre(), "l.txt").unwrap();
        assert_eq!(ok, vec!["rock", "jazz"]);
    }

    #[test]
    fn mixed_labels_split() {
        let (g, e) = parse_mixed_labels(b"music\nrock\nspeech\n", "l").unwrap();
        assert_eq!(g, vec!["rock"]);
        assert_eq!(e, vec!["music", "speech"]);
        assert!(parse_mixed_labels(b"music\npolka\n", "l")
            .unwrap_err()
            .to_string()
            .contains("l:2"));
    }

    #[test]
    fn training_dir() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("rock.csv"), "f1,f2\n1,2\n3,4\n").unwrap();
        std::fs::write(dir.path().join("jazz.csv"), "f1,f2\n0,0\n").unwrap();
        std::fs::write(dir.path().join("README"), "ignored").unwrap();
        let data = load_training_dir(dir.path(), &ClassTaxonomy::genre()).unwrap();
        assert_eq!(data.len(), 3);
        assert_eq!(data[0].label, "jazz");
        std::fs::write(dir.path().join("polka.csv"), "f1,f2\n1,2\n").unwrap();
        assert!(load_training_dir(dir.path(), &ClassTaxonomy::genre()).is_err());
    }
}
