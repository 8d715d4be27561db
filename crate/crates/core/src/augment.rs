//! Training-data augmentation: random punctuation, alphabet-variation
//! harvesting and named-entity swaps.
//!
//! Every random decision draws from a ChaCha stream keyed by `(seed, item
//! index)`, so results do not depend on processing order.

use std::collections::BTreeMap;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::labels::{Dataset, LabelSet, LabeledSentence, Split};
use crate::normalize::lowercase;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AugmentError {
    #[error("refusing to augment the {0} split")]
    EvaluationSplit(Split),
    #[error("invalid punctuation config: {0}")]
    Config(String),
    #[error("annotation {index}: sentence index {sentence} out of range ({len} sentences)")]
    SentenceOutOfRange {
        index: usize,
        sentence: usize,
        len: usize,
    },
    #[error("annotation {index}: span {start}..{end} invalid for sentence of {len} bytes")]
    BadSpan {
        index: usize,
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("annotation {index}: surface {expected:?} does not match text {found:?}")]
    SurfaceMismatch {
        index: usize,
        expected: String,
        found: String,
    },
    #[error("annotations {first} and {second} overlap in sentence {sentence}")]
    Overlap {
        sentence: usize,
        first: usize,
        second: usize,
    },
}

fn item_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn refuse_evaluation(d: &Dataset) -> Result<(), AugmentError> {
    if d.split.is_evaluation() {
        Err(AugmentError::EvaluationSplit(d.split))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PunctConfig {
    /// Probability that an eligible sentence is altered.
    pub rate: f64,
    pub end_marks: Vec<char>,
    pub start_marks: Vec<char>,
    /// Probability of a space between the mark and the sentence.
    pub space_prob: f64,
    pub seed: u64,
}

impl Default for PunctConfig {
    fn default() -> Self {
        PunctConfig {
            rate: 0.075,
            end_marks: vec!['.', '!', '?'],
            start_marks: vec!['-', '–', ','],
            space_prob: 1.0 / 3.0,
            seed: 0,
        }
    }
}

impl PunctConfig {
    pub fn validate(&self) -> Result<(), AugmentError> {
        if !(0.0..=1.0).contains(&self.rate) {
            return Err(AugmentError::Config(format!("rate {} not in [0,1]", self.rate)));
        }
        if !(0.0..=1.0).contains(&self.space_prob) {
            return Err(AugmentError::Config(format!(
                "space_prob {} not in [0,1]",
                self.space_prob
            )));
        }
        if self.end_marks.is_empty() || self.start_marks.is_empty() {
            return Err(AugmentError::Config("mark sets must be non-empty".into()));
        }
        Ok(())
    }
}

/// What happened to one sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PunctEdit {
    Append { mark: char, space: bool },
    Prepend { mark: char, space: bool },
}

impl PunctEdit {
    pub fn apply(self, text: &str) -> String {
        match self {
            PunctEdit::Append { mark, space } => {
                format!("{text}{}{mark}", if space { " " } else { "" })
            }
            PunctEdit::Prepend { mark, space } => {
                format!("{mark}{}{text}", if space { " " } else { "" })
            }
        }
    }
}

/// The edit chosen for item `index`, or `None` if it is left alone.
/// `{other}` items are never edited.
pub fn punct_edit_for(cfg: &PunctConfig, index: usize, labels: LabelSet) -> Option<PunctEdit> {
    if labels.is_other() {
        return None;
    }
    let mut rng = item_rng(cfg.seed, index);
    if !rng.random_bool(cfg.rate) {
        return None;
    }
    let append = rng.random_bool(0.5);
    let marks = if append { &cfg.end_marks } else { &cfg.start_marks };
    let mark = marks[rng.random_range(0..marks.len())];
    let space = rng.random_bool(cfg.space_prob);
    Some(if append {
        PunctEdit::Append { mark, space }
    } else {
        PunctEdit::Prepend { mark, space }
    })
}

/// Add one leading or trailing punctuation mark to a random subset of the
/// non-`other` sentences.
pub fn punctuation_augment(d: &Dataset, cfg: &PunctConfig) -> Result<Dataset, AugmentError> {
    refuse_evaluation(d)?;
    cfg.validate()?;
    let items = d
        .items
        .iter()
        .enumerate()
        .map(|(i, item)| match punct_edit_for(cfg, i, item.labels) {
            Some(edit) => LabeledSentence {
                text: edit.apply(&item.text),
                ..item.clone()
            },
            None => item.clone(),
        })
        .collect();
    Ok(Dataset::new(d.split, items))
}

/// Keep the sentences that contain at least one of `letters` (compared
/// case-insensitively) and label them with `label`.
pub fn extract_alphabet_variants<I, S>(sentences: I, letters: &[char], label: LabelSet) -> Dataset
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let wanted: Vec<char> = letters
        .iter()
        .flat_map(|c| c.to_lowercase())
        .collect();
    let items = sentences
        .into_iter()
        .filter(|s| !s.as_ref().trim().is_empty())
        .filter(|s| lowercase(s.as_ref()).chars().any(|c| wanted.contains(&c)))
        .map(|s| LabeledSentence {
            text: s.as_ref().to_string(),
            labels: label,
            source: None,
        })
        .collect();
    Dataset::new(Split::Unsplit, items)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityCategory {
    Person,
    Organization,
    Location,
    Misc,
}

impl FromStr for EntityCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "person" | "per" => Ok(EntityCategory::Person),
            "organization" | "org" => Ok(EntityCategory::Organization),
            "location" | "loc" | "gpe" => Ok(EntityCategory::Location),
            "misc" => Ok(EntityCategory::Misc),
            _ => Err(format!("unknown entity category `{s}`")),
        }
    }
}

/// One external NER annotation; `start..end` is a byte range in the
/// sentence text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityAnnotation {
    pub sentence_index: usize,
    pub start: usize,
    pub end: usize,
    pub category: EntityCategory,
    pub surface: String,
}

fn validate_annotations(
    d: &Dataset,
    annotations: &[EntityAnnotation],
) -> Result<BTreeMap<usize, Vec<usize>>, AugmentError> {
    let mut by_sentence: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (idx, ann) in annotations.iter().enumerate() {
        let item = d.items.get(ann.sentence_index).ok_or(AugmentError::SentenceOutOfRange {
            index: idx,
            sentence: ann.sentence_index,
            len: d.len(),
        })?;
        let text = &item.text;
        let valid = ann.start < ann.end
            && ann.end <= text.len()
            && text.is_char_boundary(ann.start)
            && text.is_char_boundary(ann.end);
        if !valid {
            return Err(AugmentError::BadSpan {
                index: idx,
                start: ann.start,
                end: ann.end,
                len: text.len(),
            });
        }
        let found = &text[ann.start..ann.end];
        if found != ann.surface {
            return Err(AugmentError::SurfaceMismatch {
                index: idx,
                expected: ann.surface.clone(),
                found: found.to_string(),
            });
        }
        by_sentence.entry(ann.sentence_index).or_default().push(idx);
    }
    for (&sentence, idxs) in by_sentence.iter_mut() {
        idxs.sort_by_key(|&i| (annotations[i].start, annotations[i].end));
        for pair in idxs.windows(2) {
            if annotations[pair[1]].start < annotations[pair[0]].end {
                return Err(AugmentError::Overlap {
                    sentence,
                    first: pair[0],
                    second: pair[1],
                });
            }
        }
    }
    Ok(by_sentence)
}

/// Distinct surfaces per category, in order of first appearance.
pub fn entity_inventory(annotations: &[EntityAnnotation]) -> BTreeMap<EntityCategory, Vec<String>> {
    let mut inv: BTreeMap<EntityCategory, Vec<String>> = BTreeMap::new();
    for ann in annotations {
        let list = inv.entry(ann.category).or_default();
        if !list.contains(&ann.surface) {
            list.push(ann.surface.clone());
        }
    }
    inv
}

/// Replace every annotated entity with a surface drawn uniformly from its
/// category's inventory (possibly the same one). Text outside entity spans
/// and all labels are left untouched.
pub fn ner_swap(
    d: &Dataset,
    annotations: &[EntityAnnotation],
    seed: u64,
) -> Result<Dataset, AugmentError> {
    refuse_evaluation(d)?;
    let by_sentence = validate_annotations(d, annotations)?;
    let inventory = entity_inventory(annotations);

    let mut out = d.clone();
    for (sentence, idxs) in by_sentence {
        let mut rng = item_rng(seed, sentence);
        let original = &d.items[sentence].text;
        let mut text = String::with_capacity(original.len());
        let mut cursor = 0;
        for i in idxs {
            let ann = &annotations[i];
            let pool = &inventory[&ann.category];
            let pick = &pool[rng.random_range(0..pool.len())];
            text.push_str(&original[cursor..ann.start]);
            text.push_str(pick);
            cursor = ann.end;
        }
        text.push_str(&original[cursor..]);
        out.items[sentence].text = text;
    }
    Ok(out)
}
