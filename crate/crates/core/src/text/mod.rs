//! Subtitle text to filtered bag-of-words.

mod bow;
mod lemma;
mod normalize;
mod srt;
mod vocab;

pub use bow::{build_bow, BowCorpus};
pub use lemma::Lemmatizer;
pub use normalize::normalize;
pub use srt::{parse_srt, SrtText};
pub use vocab::{build_vocabulary, bundled_stopwords, load_stopwords, parse_stopwords, FilterConfig, Vocabulary};

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::CorpusManifest;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenStream {
    pub movie_id: String,
    pub tokens: Vec<String>,
}

/// Parse, normalize and lemmatize one subtitle file.
pub fn subtitle_tokens(movie_id: &str, bytes: &[u8], lemmatizer: &Lemmatizer) -> Result<(TokenStream, SrtText)> {
    let parsed = parse_srt(bytes)?;
    let tokens = normalize(&parsed.text)
        .iter()
        .map(|t| lemmatizer.lemmatize(t))
        .collect();
    Ok((
        TokenStream {
            movie_id: movie_id.to_string(),
            tokens,
        },
        parsed,
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IngestStats {
    pub movie_id: String,
    pub cues: usize,
    pub skipped_blocks: usize,
    pub tokens: usize,
}

#[derive(Debug, Clone)]
pub struct TextIngest {
    pub bow: BowCorpus,
    pub stats: Vec<IngestStats>,
}

/// Runs the whole subtitle pipeline over a manifest, one movie per task.
pub fn ingest_text(
    manifest: &CorpusManifest,
    lemmatizer: &Lemmatizer,
    stopwords: &HashSet<String>,
    cfg: &FilterConfig,
) -> Result<TextIngest> {
    let results: Vec<(TokenStream, IngestStats)> = manifest
        .movies
        .par_iter()
        .map(|movie| {
            let path = &manifest.subtitle_paths[&movie.id];
            let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
            let (stream, parsed) = subtitle_tokens(&movie.id, &bytes, lemmatizer).map_err(|e| match e {
                Error::Encoding { offset } => {
                    Error::Validation(format!("{}: not valid UTF-8 at byte offset {offset}", path.display()))
                }
                other => other,
            })?;
            let stats = IngestStats {
                movie_id: movie.id.clone(),
                cues: parsed.cues,
                skipped_blocks: parsed.skipped_blocks,
                tokens: stream.tokens.len(),
            };
            Ok((stream, stats))
        })
        .collect::<Result<_>>()?;
    let (streams, stats): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let vocab = build_vocabulary(&streams, stopwords, cfg)?;
    Ok(TextIngest {
        bow: build_bow(&streams, &vocab),
        stats,
    })
}
