//! Loose accuracy, exact-match accuracy and per-language F1.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::labels::{LabelSet, Language};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("pair {index}: loose accuracy needs a single predicted label, got {predicted}")]
    NotSingleton { index: usize, predicted: LabelSet },
    #[error("pair {index}: no top-1 label supplied")]
    MissingTop1 { index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalPair {
    pub predicted: LabelSet,
    pub gold: LabelSet,
    /// Highest-probability label of a multi-label predictor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top1: Option<Language>,
}

impl EvalPair {
    pub fn new(predicted: LabelSet, gold: LabelSet) -> Self {
        EvalPair {
            predicted,
            gold,
            top1: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LooseMode {
    /// The prediction itself must be a single label.
    Single,
    /// Score the supplied top-1 label of a multi-label prediction.
    Top1,
}

/// Fraction of pairs whose single predicted label is among the gold labels.
///
/// Multi-label predictions are rejected in `Single` mode: scoring them by
/// intersection would give a predictor that always answers every language
/// a perfect score.
pub fn loose_accuracy(pairs: &[EvalPair], mode: LooseMode) -> Result<f64, EvalError> {
    let mut hits = 0usize;
    for (index, pair) in pairs.iter().enumerate() {
        let label = match mode {
            LooseMode::Single => pair.predicted.as_single().ok_or(EvalError::NotSingleton {
                index,
                predicted: pair.predicted,
            })?,
            LooseMode::Top1 => pair.top1.ok_or(EvalError::MissingTop1 { index })?,
        };
        if pair.gold.contains(label) {
            hits += 1;
        }
    }
    Ok(fraction(hits, pairs.len()))
}

pub fn exact_match_accuracy(pairs: &[EvalPair]) -> f64 {
    let hits = pairs.iter().filter(|p| p.predicted == p.gold).count();
    fraction(hits, pairs.len())
}

fn fraction(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LanguageScore {
    pub language: Language,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    /// `None` when the label never occurs in gold or predictions.
    pub f1: Option<f64>,
}

impl LanguageScore {
    fn from_counts(language: Language, tp: usize, fp: usize, fn_: usize) -> Self {
        if tp + fp + fn_ == 0 {
            return LanguageScore {
                language,
                tp,
                fp,
                fn_,
                precision: 0.0,
                recall: 0.0,
                f1: None,
            };
        }
        let precision = fraction(tp, tp + fp);
        let recall = fraction(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        LanguageScore {
            language,
            tp,
            fp,
            fn_,
            precision,
            recall,
            f1: Some(f1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct F1Report {
    /// In canonical order (da, nb, nn, sv, other).
    pub per_language: Vec<LanguageScore>,
    /// Mean over the labels with a defined F1; `None` if there are none.
    pub macro_f1: Option<f64>,
}

impl F1Report {
    pub fn get(&self, lang: Language) -> &LanguageScore {
        &self.per_language[lang.index()]
    }
}

/// Per-label precision, recall and F1, where a true positive needs the
/// label in both the predicted and the gold set.
///
/// A label with no true positives, false positives or false negatives has
/// an undefined F1 and is left out of the macro average. When only one of
/// precision and recall is 0/0, it counts as 0.
pub fn per_language_f1(pairs: &[EvalPair]) -> F1Report {
    let mut counts = [(0usize, 0usize, 0usize); 5];
    for pair in pairs {
        for lang in Language::ALL {
            let (p, g) = (pair.predicted.contains(lang), pair.gold.contains(lang));
            let c = &mut counts[lang.index()];
            match (p, g) {
                (true, true) => c.0 += 1,
                (true, false) => c.1 += 1,
                (false, true) => c.2 += 1,
                (false, false) => {}
            }
        }
    }
    let per_language: Vec<LanguageScore> = Language::ALL
        .iter()
        .zip(counts)
        .map(|(&lang, (tp, fp, fn_))| LanguageScore::from_counts(lang, tp, fp, fn_))
        .collect();
    let defined: Vec<f64> = per_language.iter().filter_map(|s| s.f1).collect();
    let macro_f1 = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
    F1Report {
        per_language,
        macro_f1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ls(s: &str) -> LabelSet {
        s.parse().unwrap()
    }

    fn pair(p: &str, g: &str) -> EvalPair {
        EvalPair::new(ls(p), ls(g))
    }

    #[test]
    fn loose_examples() {
        assert_eq!(loose_accuracy(&[pair("nb", "nb,da")], LooseMode::Single), Ok(1.0));
        assert_eq!(loose_accuracy(&[pair("other", "da")], LooseMode::Single), Ok(0.0));
        assert_eq!(
            loose_accuracy(&[pair("da", "da"), pair("da,nb,nn,sv", "nb")], LooseMode::Single),
            Err(EvalError::NotSingleton {
                index: 1,
                predicted: ls("da,nb,nn,sv")
            })
        );
    }

    #[test]
    fn loose_top1() {
        let mut p = pair("da,nb", "nb");
        assert_eq!(
            loose_accuracy(&[p], LooseMode::Top1),
            Err(EvalError::MissingTop1 { index: 0 })
        );
        p.top1 = Some(Language::Nb);
        assert_eq!(loose_accuracy(&[p], LooseMode::Top1), Ok(1.0));
        p.top1 = Some(Language::Da);
        assert_eq!(loose_accuracy(&[p], LooseMode::Top1), Ok(0.0));
    }

    #[test]
    fn exact_examples() {
        assert_eq!(exact_match_accuracy(&[pair("nb,da", "da,nb")]), 1.0);
        assert_eq!(exact_match_accuracy(&[pair("nb", "nb,da")]), 0.0);
        assert_eq!(exact_match_accuracy(&[]), 0.0);
    }

    #[test]
    fn f1_hand_counted() {
        let pairs = [pair("nb", "nb"), pair("nb", "nn"), pair("nn,nb", "nn,nb")];
        let r = per_language_f1(&pairs);
        let nb = r.get(Language::Nb);
        assert_eq!((nb.tp, nb.fp, nb.fn_), (2, 1, 0));
        assert!((nb.f1.unwrap() - 0.8).abs() < 1e-12);
        let nn = r.get(Language::Nn);
        assert_eq!((nn.tp, nn.fp, nn.fn_), (1, 0, 1));
        assert!((nn.f1.unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.get(Language::Da).f1, None);
        assert_eq!(r.get(Language::Other).f1, None);
        assert!((r.macro_f1.unwrap() - (0.8 + 2.0 / 3.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn f1_perfect() {
        let pairs = [pair("da", "da"), pair("other", "other"), pair("sv,nb", "sv,nb")];
        let r = per_language_f1(&pairs);
        for s in &r.per_language {
            if let Some(f) = s.f1 {
                assert_eq!(f, 1.0, "{:?}", s.language);
            }
        }
        assert_eq!(r.macro_f1, Some(1.0));
    }

    #[test]
    fn f1_half_undefined_counts_as_zero() {
        // Predicted `da` but never in gold: precision 0, recall 0/0 -> 0.
        let r = per_language_f1(&[pair("da", "sv")]);
        let da = r.get(Language::Da);
        assert_eq!((da.precision, da.recall, da.f1), (0.0, 0.0, Some(0.0)));
    }
}
