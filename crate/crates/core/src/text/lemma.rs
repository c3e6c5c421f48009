//! Dictionary-plus-rules lemmatizer.
//!
//! A bundled `form<TAB>lemma` table covers irregular and e-final forms; the
//! remaining inflections go through ordered suffix rules. Rules repeat until
//! none fires, so every output is a fixed point.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};

const BUNDLED_TABLE: &str = include_str!("../../resources/lemmas.tsv");

#[derive(Debug, Clone)]
pub struct Lemmatizer {
    table: HashMap<String, String>,
    lemmas: HashSet<String>,
}

impl Lemmatizer {
    pub fn bundled() -> Self {
        Self::from_tsv(BUNDLED_TABLE).expect("bundled lemma table is valid")
    }

    /// Parses `form<TAB>lemma` lines; `#` starts a comment line.
    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut table = HashMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (form, lemma) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(format!("lemma table line {}", n + 1), "expected form<TAB>lemma"))?;
            table.insert(form.trim().to_string(), lemma.trim().to_string());
        }
        for (form, lemma) in &table {
            if let Some(next) = table.get(lemma) {
                if next != lemma {
                    return Err(Error::Validation(format!(
                        "lemma table maps {form:?} to {lemma:?}, which itself maps to {next:?}"
                    )));
                }
            }
        }
        let lemmas = table.values().cloned().collect();
        Ok(Lemmatizer { table, lemmas })
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn lemmatize(&self, token: &str) -> String {
        let mut current = token.to_string();
        loop {
            if let Some(lemma) = self.table.get(&current) {
                return lemma.clone();
            }
            if self.lemmas.contains(&current) {
                return current;
            }
            match strip_suffix(&current) {
                Some(next) => current = next,
                None => return current,
            }
        }
    }
}

impl Default for Lemmatizer {
    fn default() -> Self {
        Self::bundled()
    }
}

fn has_vowel(s: &str) -> bool {
    s.bytes().any(|b| matches!(b, b'a' | b'e' | b'i' | b'o' | b'u' | b'y'))
}

/// `runn` -> `run`; `fall`, `kiss`, `add` stay.
fn undo_doubling(stem: &str) -> String {
    let b = stem.as_bytes();
    let n = b.len();
    if n >= 4 && b[n - 1] == b[n - 2] && matches!(b[n - 1], b'b' | b'd' | b'g' | b'm' | b'n' | b'p' | b'r' | b't') {
        stem[..n - 1].to_string()
    } else {
        stem.to_string()
    }
}

fn strip_suffix(t: &str) -> Option<String> {
    if !t.bytes().all(|b| b.is_ascii_lowercase()) {
        return None;
    }
    let n = t.len();
    if n >= 5 && t.ends_with("ies") {
        return Some(format!("{}y", &t[..n - 3]));
    }
    if n >= 5 && t.ends_with("es") {
        let stem = &t[..n - 2];
        if ["s", "x", "z", "ch", "sh"].iter().any(|s| stem.ends_with(s)) {
            return Some(stem.to_string());
        }
    }
    if n >= 4 && t.ends_with('s') && !["ss", "us", "is"].iter().any(|s| t.ends_with(s)) {
        return Some(t[..n - 1].to_string());
    }
    if n >= 6 && t.ends_with("ing") {
        let stem = &t[..n - 3];
        if has_vowel(stem) {
            return Some(undo_doubling(stem));
        }
    }
    if n >= 5 && t.ends_with("ed") && !t.ends_with("eed") {
        let stem = &t[..n - 2];
        if has_vowel(stem) {
            return Some(undo_doubling(stem));
        }
    }
    None
}
