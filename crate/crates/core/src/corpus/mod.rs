//! Raw corpus inputs: the JSON manifest, movie metadata records and
//! tag-relevance data, plus the on-disk artifact store.

mod artifacts;
mod tags;

pub use artifacts::{ArtifactStore, JSON_FORMAT_VERSION, MATRIX_FORMAT_VERSION};
pub use tags::{load_tags, parse_tags, tag_space, TagVector};

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Metadata for one movie. The three categorical sets may be empty but the
/// manifest must always spell them out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MovieRecord {
    pub id: String,
    pub title: String,
    pub cast: BTreeSet<String>,
    pub directors: BTreeSet<String>,
    pub genres: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AudioInputKind {
    /// Per-segment feature CSV, classified with the trained SVMs.
    Features,
    /// Pre-classified segment labels, one per line.
    Labels,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AudioInput {
    pub kind: AudioInputKind,
    pub path: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    movies: Vec<MovieRecord>,
    subtitles: BTreeMap<String, PathBuf>,
    #[serde(default)]
    audio: BTreeMap<String, AudioInput>,
    #[serde(default)]
    tags: Option<PathBuf>,
}

/// Validated corpus description. Paths are resolved against the manifest's
/// directory; `movies` order is the canonical movie order for every derived
/// artifact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusManifest {
    pub movies: Vec<MovieRecord>,
    pub subtitle_paths: BTreeMap<String, PathBuf>,
    pub audio_input: BTreeMap<String, AudioInput>,
    pub tags_path: Option<PathBuf>,
}

impl CorpusManifest {
    pub fn movie_order(&self) -> Vec<String> {
        self.movies.iter().map(|m| m.id.clone()).collect()
    }

    pub fn movie(&self, id: &str) -> Option<&MovieRecord> {
        self.movies.iter().find(|m| m.id == id)
    }
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<CorpusManifest> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let manifest = parse_manifest(&bytes, base)?;
    check_files_exist(&manifest)?;
    Ok(manifest)
}

/// Parses and validates manifest bytes without touching the filesystem.
/// Relative paths are joined onto `base`.
pub fn parse_manifest(bytes: &[u8], base: &Path) -> Result<CorpusManifest> {
    let raw: RawManifest = serde_json::from_slice(bytes)
        .map_err(|e| Error::parse(format!("manifest line {}", e.line()), e.to_string()))?;

    let mut seen = HashSet::new();
    for movie in &raw.movies {
        if movie.id.is_empty() {
            return Err(Error::Validation("movie id must be non-empty".into()));
        }
        if !seen.insert(movie.id.as_str()) {
            return Err(Error::Validation(format!("duplicate movie id {:?}", movie.id)));
        }
    }

    let dangling = raw
        .subtitles
        .keys()
        .chain(raw.audio.keys())
        .find(|id| !seen.contains(id.as_str()));
    if let Some(id) = dangling {
        return Err(Error::Validation(format!(
            "path map references unknown movie id {id:?}"
        )));
    }
    if let Some(m) = raw.movies.iter().find(|m| !raw.subtitles.contains_key(&m.id)) {
        return Err(Error::Validation(format!("movie {:?} has no subtitle path", m.id)));
    }

    let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
    Ok(CorpusManifest {
        movies: raw.movies,
        subtitle_paths: raw.subtitles.into_iter().map(|(id, p)| (id, resolve(p))).collect(),
        audio_input: raw
            .audio
            .into_iter()
            .map(|(id, a)| {
                (
                    id,
                    AudioInput {
                        kind: a.kind,
                        path: resolve(a.path),
                    },
                )
            })
            .collect(),
        tags_path: raw.tags.map(resolve),
    })
}

fn check_files_exist(manifest: &CorpusManifest) -> Result<()> {
    let paths = manifest
        .subtitle_paths
        .values()
        .chain(manifest.audio_input.values().map(|a| &a.path))
        .chain(manifest.tags_path.iter());
    for p in paths {
        if !p.is_file() {
            return Err(Error::io(
                p,
                std::io::Error::new(std::io::ErrorKind::NotFound, "referenced file not found"),
            ));
        }
    }
    Ok(())
}
