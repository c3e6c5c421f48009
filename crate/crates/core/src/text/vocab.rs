use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::TokenStream;
use crate::error::{Error, Result};

const GENERAL_STOPWORDS: &str = include_str!("../../resources/stopwords_en.txt");
const MOVIE_STOPWORDS: &str = include_str!("../../resources/stopwords_movie.txt");

/// Parses a one-term-per-line list; `#` lines and blanks are ignored.
pub fn parse_stopwords(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

pub fn load_stopwords(path: impl AsRef<Path>) -> Result<HashSet<String>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_stopwords(&text))
}

/// General English list plus the movie/subtitle domain list.
pub fn bundled_stopwords() -> HashSet<String> {
    let mut set = parse_stopwords(GENERAL_STOPWORDS);
    set.extend(parse_stopwords(MOVIE_STOPWORDS));
    set
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub min_doc_freq: usize,
    pub max_doc_ratio: f64,
    /// Together with `low_info_min_doc_ratio`: a term never occurring more
    /// than this many times in any one document, yet spread over at least
    /// that fraction of documents, carries little information.
    pub low_info_max_tf: u32,
    pub low_info_min_doc_ratio: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            min_doc_freq: 2,
            max_doc_ratio: 0.95,
            low_info_max_tf: 2,
            low_info_min_doc_ratio: 0.5,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self, corpus_size: usize) -> Result<()> {
        if self.min_doc_freq < 1 || self.min_doc_freq > corpus_size {
            return Err(Error::Parameter(format!(
                "min_doc_freq {} must lie in [1, {corpus_size}]",
                self.min_doc_freq
            )));
        }
        let in_unit = |x: f64| x > 0.0 && x <= 1.0;
        if !in_unit(self.max_doc_ratio) {
            return Err(Error::Parameter(format!(
                "max_doc_ratio {} must lie in (0, 1]",
                self.max_doc_ratio
            )));
        }
        if !in_unit(self.low_info_min_doc_ratio) {
            return Err(Error::Parameter(format!(
                "low_info_min_doc_ratio {} must lie in (0, 1]",
                self.low_info_min_doc_ratio
            )));
        }
        if self.low_info_max_tf < 1 {
            return Err(Error::Parameter("low_info_max_tf must be at least 1".into()));
        }
        Ok(())
    }
}

/// Lexicographically ordered term list with its reverse index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new(terms: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate vocabulary term {t:?}")));
            }
        }
        Ok(Vocabulary { terms, index })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term(&self, id: usize) -> &str {
        &self.terms[id]
    }

    pub fn id(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }
}

impl TryFrom<Vec<String>> for Vocabulary {
    type Error = Error;

    fn try_from(terms: Vec<String>) -> Result<Self> {
        Vocabulary::new(terms)
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.terms
    }
}

#[derive(Default)]
struct TermStats {
    doc_freq: usize,
    max_tf: u32,
}

pub fn build_vocabulary(
    streams: &[TokenStream],
    stopwords: &HashSet<String>,
    cfg: &FilterConfig,
) -> Result<Vocabulary> {
    if streams.is_empty() {
        return Err(Error::Parameter("vocabulary needs at least one token stream".into()));
    }
    let n = streams.len();
    cfg.validate(n)?;

    let mut stats: BTreeMap<&str, TermStats> = BTreeMap::new();
    for stream in streams {
        let mut tf: HashMap<&str, u32> = HashMap::new();
        for t in &stream.tokens {
            *tf.entry(t.as_str()).or_default() += 1;
        }
        for (term, count) in tf {
            let s = stats.entry(term).or_default();
            s.doc_freq += 1;
            s.max_tf = s.max_tf.max(count);
        }
    }

    let terms: Vec<String> = stats
        .into_iter()
        .filter(|(term, s)| {
            let ratio = s.doc_freq as f64 / n as f64;
            let low_info = s.max_tf <= cfg.low_info_max_tf && ratio >= cfg.low_info_min_doc_ratio;
            !stopwords.contains(*term) && s.doc_freq >= cfg.min_doc_freq && ratio <= cfg.max_doc_ratio && !low_info
        })
        .map(|(term, _)| term.to_string())
        .collect();
    if terms.is_empty() {
        return Err(Error::Validation(
            "no term survived vocabulary filtering; relax the filter configuration".into(),
        ));
    }
    Vocabulary::new(terms)
}
