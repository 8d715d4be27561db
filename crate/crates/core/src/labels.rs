//! Language tags, label sets and labeled datasets.
//!
//! A [`LabelSet`] is a non-empty subset of the five tags. `other` marks a
//! sentence that is valid in none of the Scandinavian languages, so it can
//! never be combined with a language tag. That rule is enforced when a set
//! is constructed; an invalid set cannot exist.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelError {
    #[error("unknown language tag `{0}`")]
    UnknownTag(String),
    #[error("empty label set")]
    Empty,
    #[error("`other` cannot be combined with a language label (got {0})")]
    OtherNotExclusive(String),
    #[error("empty sentence text")]
    EmptyText,
}

/// One of the five tags, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Language {
    Da,
    Nb,
    Nn,
    Sv,
    Other,
}

impl Language {
    /// All tags in canonical order.
    pub const ALL: [Language; 5] = [
        Language::Da,
        Language::Nb,
        Language::Nn,
        Language::Sv,
        Language::Other,
    ];

    /// The four Scandinavian languages, which is also the model output order.
    pub const SCANDINAVIAN: [Language; 4] =
        [Language::Da, Language::Nb, Language::Nn, Language::Sv];

    pub fn as_str(self) -> &'static str {
        match self {
            Language::Da => "da",
            Language::Nb => "nb",
            Language::Nn => "nn",
            Language::Sv => "sv",
            Language::Other => "other",
        }
    }

    /// Position in canonical order.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Language> {
        Self::ALL.get(i).copied()
    }

    pub fn is_other(self) -> bool {
        self == Language::Other
    }

    fn bit(self) -> u8 {
        1 << self.index()
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Language {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "da" => Ok(Language::Da),
            "nb" => Ok(Language::Nb),
            "nn" => Ok(Language::Nn),
            "sv" => Ok(Language::Sv),
            "other" => Ok(Language::Other),
            _ => Err(LabelError::UnknownTag(s.to_string())),
        }
    }
}

impl Serialize for Language {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Language {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

const OTHER_BIT: u8 = 1 << 4;
const SCANDINAVIAN_BITS: u8 = 0b1111;

/// A valid, non-empty set of language tags.
///
/// Stored as a bitmask over [`Language::ALL`], so iteration is always in
/// canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LabelSet(u8);

impl LabelSet {
    pub const OTHER: LabelSet = LabelSet(OTHER_BIT);
    pub const ALL_SCANDINAVIAN: LabelSet = LabelSet(SCANDINAVIAN_BITS);

    pub fn single(lang: Language) -> LabelSet {
        LabelSet(lang.bit())
    }

    /// Build a set from individual languages. Duplicates collapse.
    pub fn from_languages<I>(langs: I) -> Result<LabelSet, LabelError>
    where
        I: IntoIterator<Item = Language>,
    {
        let bits = langs.into_iter().fold(0u8, |acc, l| acc | l.bit());
        Self::from_bits(bits)
    }

    /// Validate a raw bitmask (bit i = `Language::ALL[i]`).
    pub fn from_bits(bits: u8) -> Result<LabelSet, LabelError> {
        if bits & !(SCANDINAVIAN_BITS | OTHER_BIT) != 0 {
            return Err(LabelError::UnknownTag(format!("bitmask {bits:#b}")));
        }
        if bits == 0 {
            return Err(LabelError::Empty);
        }
        if bits & OTHER_BIT != 0 && bits != OTHER_BIT {
            return Err(LabelError::OtherNotExclusive(
                LabelSet(bits).iter().map(|l| l.as_str()).collect::<Vec<_>>().join(","),
            ));
        }
        Ok(LabelSet(bits))
    }

    /// Parse a sequence of tags.
    pub fn parse<I, S>(tags: I) -> Result<LabelSet, LabelError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut bits = 0u8;
        for tag in tags {
            bits |= tag.as_ref().trim().parse::<Language>()?.bit();
        }
        Self::from_bits(bits)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn contains(self, lang: Language) -> bool {
        self.0 & lang.bit() != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Always false; present for API symmetry with collections.
    pub fn is_empty(self) -> bool {
        false
    }

    pub fn is_other(self) -> bool {
        self.0 == OTHER_BIT
    }

    /// The single member, if this is a singleton.
    pub fn as_single(self) -> Option<Language> {
        if self.len() == 1 {
            self.iter().next()
        } else {
            None
        }
    }

    pub fn iter(self) -> impl Iterator<Item = Language> {
        Language::ALL.into_iter().filter(move |l| self.contains(*l))
    }

    /// Add a Scandinavian language. Returns `None` when `self` is `{other}`
    /// or `lang` is `other`, since either would break exclusivity.
    pub fn with(self, lang: Language) -> Option<LabelSet> {
        if self.is_other() || lang.is_other() {
            return None;
        }
        Some(LabelSet(self.0 | lang.bit()))
    }

    pub fn is_superset(self, other: LabelSet) -> bool {
        self.0 & other.0 == other.0
    }

    /// Target vector in model output order (da, nb, nn, sv). `{other}` maps
    /// to all zeros.
    pub fn target_vector(self) -> [f64; 4] {
        let mut t = [0.0; 4];
        for (slot, lang) in t.iter_mut().zip(Language::SCANDINAVIAN) {
            if self.contains(lang) {
                *slot = 1.0;
            }
        }
        t
    }

    pub fn to_tags(self) -> Vec<&'static str> {
        self.iter().map(Language::as_str).collect()
    }
}

impl fmt::Display for LabelSet {
    /// Comma-joined tags in canonical order, e.g. `da,nb`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, lang) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(lang.as_str())?;
        }
        Ok(())
    }
}

impl FromStr for LabelSet {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().is_empty() {
            return Err(LabelError::Empty);
        }
        LabelSet::parse(s.split(','))
    }
}

impl Serialize for LabelSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for LabelSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let tags = Vec::<String>::deserialize(deserializer)?;
        LabelSet::parse(&tags).map_err(serde::de::Error::custom)
    }
}

/// One sentence with its gold labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSentence {
    pub text: String,
    pub labels: LabelSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl LabeledSentence {
    pub fn new(text: impl Into<String>, labels: LabelSet) -> Result<Self, LabelError> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(LabelError::EmptyText);
        }
        Ok(LabeledSentence {
            text,
            labels,
            source: None,
        })
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
    #[default]
    Unsplit,
}

impl Split {
    pub fn is_evaluation(self) -> bool {
        matches!(self, Split::Validation | Split::Test)
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "validation" | "valid" | "dev" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            "unsplit" => Ok(Split::Unsplit),
            _ => Err(format!("unknown split `{s}`")),
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
            Split::Unsplit => "unsplit",
        })
    }
}

/// An ordered collection of labeled sentences belonging to one split.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dataset {
    pub split: Split,
    pub items: Vec<LabeledSentence>,
}

impl Dataset {
    pub fn new(split: Split, items: Vec<LabeledSentence>) -> Self {
        Dataset { split, items }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LabeledSentence> {
        self.items.iter()
    }
}

impl<'a> IntoIterator for &'a Dataset {
    type Item = &'a LabeledSentence;
    type IntoIter = std::slice::Iter<'a, LabeledSentence>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}
