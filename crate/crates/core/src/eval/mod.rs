//! Evaluation metrics, reports and throughput measurement.

mod bench;
mod metrics;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub use bench::{benchmark, BenchResult, DEFAULT_RUNS};
pub use metrics::{
    exact_match_accuracy, loose_accuracy, per_language_f1, EvalError, EvalPair, F1Report,
    LanguageScore, LooseMode,
};

use crate::labels::{Dataset, Language};
use crate::model::FastModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n: usize,
    /// `None` when it could not be computed (multi-label predictions without
    /// a top-1 label).
    pub loose_accuracy: Option<f64>,
    pub loose_mode: LooseMode,
    pub exact_match_accuracy: f64,
    pub per_language: Vec<LanguageScore>,
    pub macro_f1: Option<f64>,
    /// How undefined F1 values are handled.
    pub f1_convention: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ms_per_sample: Option<f64>,
}

const F1_CONVENTION: &str = "labels with TP+FP+FN=0 have undefined F1 and are excluded from macro F1; a single 0/0 precision or recall counts as 0";

impl EvalReport {
    /// Score `pairs`. Loose accuracy uses top-1 labels when every pair has
    /// one, and single-label mode otherwise.
    pub fn from_pairs(pairs: &[EvalPair]) -> Self {
        let mode = if !pairs.is_empty() && pairs.iter().all(|p| p.top1.is_some()) {
            LooseMode::Top1
        } else {
            LooseMode::Single
        };
        let f1 = per_language_f1(pairs);
        EvalReport {
            n: pairs.len(),
            loose_accuracy: loose_accuracy(pairs, mode).ok(),
            loose_mode: mode,
            exact_match_accuracy: exact_match_accuracy(pairs),
            per_language: f1.per_language,
            macro_f1: f1.macro_f1,
            f1_convention: F1_CONVENTION.to_string(),
            ms_per_sample: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned text table: loose, exact-match, per-language F1, ms/sample.
    /// Percentages with one decimal; `-` for missing values.
    pub fn to_table(&self) -> String {
        let pct = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{:.1}", 100.0 * x));
        let mut header = vec!["Loose".to_string(), "Exact".to_string()];
        header.extend(Language::ALL.iter().map(|l| format!("F1 {l}")));
        header.push("ms/sample".to_string());
        let mut row = vec![pct(self.loose_accuracy), pct(Some(self.exact_match_accuracy))];
        row.extend(self.per_language.iter().map(|s| pct(s.f1)));
        row.push(self.ms_per_sample.map_or("-".to_string(), |v| format!("{v:.2}")));

        let widths: Vec<usize> = header.iter().zip(&row).map(|(h, r)| h.len().max(r.len())).collect();
        let mut out = String::new();
        for line in [&header, &row] {
            let cells: Vec<String> = line
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect();
            let _ = writeln!(out, "{}", cells.join("  ").trim_end());
        }
        let _ = writeln!(out, "n = {}, macro F1 = {}", self.n, pct(self.macro_f1));
        out
    }
}

/// Run `model` over `gold` (raw text, normalized by the model's own
/// config) and pair its predictions with the gold labels.
pub fn predict_pairs(model: &FastModel, gold: &Dataset) -> Vec<EvalPair> {
    gold.iter()
        .map(|item| {
            let (predicted, top1) = model.classify(&item.text);
            EvalPair {
                predicted,
                gold: item.labels,
                top1: Some(top1),
            }
        })
        .collect()
}
