use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const GENRE_LABELS: [&str; 8] = [
    "blues",
    "classical",
    "country",
    "electronic",
    "jazz",
    "rap",
    "reggae",
    "rock",
];

pub const EVENT_LABELS: [&str; 8] = [
    "music",
    "speech",
    "env_background",
    "env_abrupt",
    "env_constant_high",
    "gunshots",
    "screams",
    "fights",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaxonomyKind {
    Genre,
    Event,
}

impl TaxonomyKind {
    pub const ALL: [TaxonomyKind; 2] = [TaxonomyKind::Genre, TaxonomyKind::Event];

    pub fn as_str(self) -> &'static str {
        match self {
            TaxonomyKind::Genre => "genre",
            TaxonomyKind::Event => "event",
        }
    }

    pub fn labels(self) -> &'static [&'static str; 8] {
        match self {
            TaxonomyKind::Genre => &GENRE_LABELS,
            TaxonomyKind::Event => &EVENT_LABELS,
        }
    }
}

impl fmt::Display for TaxonomyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaxonomyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "genre" => Ok(TaxonomyKind::Genre),
            "event" => Ok(TaxonomyKind::Event),
            other => Err(Error::Parameter(format!(
                "unknown taxonomy `{other}` (expected genre or event)"
            ))),
        }
    }
}

/// One of the two fixed label sets. Construct through [`ClassTaxonomy::of`];
/// deserialization rejects anything but the exact lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTaxonomy")]
pub struct ClassTaxonomy {
    kind: TaxonomyKind,
    labels: Vec<String>,
}

#[derive(Deserialize)]
struct RawTaxonomy {
    kind: TaxonomyKind,
    labels: Vec<String>,
}

impl TryFrom<RawTaxonomy> for ClassTaxonomy {
    type Error = Error;

    fn try_from(raw: RawTaxonomy) -> Result<Self> {
        let t = ClassTaxonomy::of(raw.kind);
        if raw.labels != t.labels {
            return Err(Error::Validation(format!(
                "{} taxonomy must be exactly [{}]",
                raw.kind,
                t.labels.join(", ")
            )));
        }
        Ok(t)
    }
}

impl ClassTaxonomy {
    pub fn of(kind: TaxonomyKind) -> Self {
        ClassTaxonomy {
            kind,
            labels: kind.labels().iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn genre() -> Self {
        Self::of(TaxonomyKind::Genre)
    }

    pub fn event() -> Self {
        Self::of(TaxonomyKind::Event)
    }

    pub fn kind(&self) -> TaxonomyKind {
        self.kind
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Which taxonomy a label belongs to. The two lists share no labels.
pub fn taxonomy_of_label(label: &str) -> Option<TaxonomyKind> {
    TaxonomyKind::ALL.into_iter().find(|k| k.labels().contains(&label))
}
