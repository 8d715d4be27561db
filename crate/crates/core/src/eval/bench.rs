//! Batch-size-one latency measurement.

use std::hint::black_box;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub const DEFAULT_RUNS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    /// Mean over runs of milliseconds per sentence.
    pub ms_per_sample: f64,
    pub per_run_ms: Vec<f64>,
    pub sentences: usize,
}

/// Time `predict` on each sentence individually. One untimed warm-up pass,
/// then `runs` timed passes; each pass reports total time over sentence
/// count. Runs on the calling thread only.
///
/// Panics if `runs` is zero or `sentences` is empty.
pub fn benchmark<F, R>(mut predict: F, sentences: &[String], runs: usize) -> BenchResult
where
    F: FnMut(&str) -> R,
{
    assert!(runs >= 1, "runs must be at least 1");
    assert!(!sentences.is_empty(), "need at least one sentence");

    for s in sentences {
        black_box(predict(black_box(s)));
    }
    let per_run_ms: Vec<f64> = (0..runs)
        .map(|_| {
            let mut total = 0.0;
            for s in sentences {
                let start = Instant::now();
                black_box(predict(black_box(s)));
                total += start.elapsed().as_secs_f64();
            }
            1e3 * total / sentences.len() as f64
        })
        .collect();
    BenchResult {
        ms_per_sample: per_run_ms.iter().sum::<f64>() / runs as f64,
        per_run_ms,
        sentences: sentences.len(),
    }
}
