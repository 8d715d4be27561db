//! The fast classifier.
//!
//! A sentence is embedded as the mean of its hashed n-gram embedding rows,
//! passed through one hidden layer of 64 ReLU units and four sigmoid
//! outputs (da, nb, nn, sv). A language is accepted when its probability
//! reaches the threshold; if none does, the prediction is `{other}`.

// Dense-layer code indexes several parallel arrays at once.
#![allow(clippy::needless_range_loop)]

mod featurize;
mod gradcheck;
mod io;
mod train;

use std::path::PathBuf;

use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::labels::{LabelSet, Language};
use crate::normalize::{normalize, NormalizeConfig};

pub use featurize::{fnv1a, FeaturizerConfig};
pub use gradcheck::{gradient_check, GradCheckReport};
pub use io::{load_model, read_model, save_model, write_model, FORMAT_VERSION, MAGIC};
pub use train::{
    batch_gradient, mean_loss, train, train_from, EvalPoint, Example, Gradients, Params,
    SelectionMetric, TrainConfig, TrainHistory,
};

/// Hidden layer width.
pub const HIDDEN: usize = 64;
/// Output units, one per Scandinavian language.
pub const OUTPUTS: usize = 4;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("not a model file: expected magic {expected:?}, found {found:?}")]
    BadMagic { expected: String, found: String },
    #[error("unsupported model version: expected {expected}, found {found}")]
    Version { expected: u16, found: u16 },
    #[error("checksum mismatch: {0}")]
    Checksum(String),
    #[error("malformed model header: {0}")]
    Header(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("non-finite loss {loss} at step {step} (epoch {epoch}, lr {learning_rate})")]
    NonFiniteLoss {
        step: usize,
        epoch: usize,
        loss: f64,
        learning_rate: f64,
    },
}

/// Number of classifier-head parameters (both dense layers, not counting
/// the embedding table) for a given input dimension.
pub fn head_parameter_count(embed_dim: usize) -> usize {
    HIDDEN * embed_dim + HIDDEN + OUTPUTS * HIDDEN + OUTPUTS
}

/// Borrowed view of the network weights, generic over the storage type so
/// the same arithmetic serves `f32` models and `f64` training parameters.
#[derive(Clone, Copy)]
pub(crate) struct Weights<'a, W> {
    pub dim: usize,
    pub embeddings: &'a [W],
    pub w1: &'a [W],
    pub b1: &'a [W],
    pub w2: &'a [W],
    pub b2: &'a [W],
}

/// Intermediate values of one forward pass.
pub(crate) struct Activations {
    pub embedding: Vec<f64>,
    pub pre_hidden: [f64; HIDDEN],
    pub hidden: [f64; HIDDEN],
    pub logits: [f64; OUTPUTS],
}

impl<W: Copy + Into<f64>> Weights<'_, W> {
    /// Mean of the embedding rows named by `grams`; zero for no grams.
    pub fn embed(&self, grams: &[u32], out: &mut Vec<f64>) {
        out.clear();
        out.resize(self.dim, 0.0);
        if grams.is_empty() {
            return;
        }
        for &g in grams {
            let row = &self.embeddings[g as usize * self.dim..(g as usize + 1) * self.dim];
            for (o, &w) in out.iter_mut().zip(row) {
                *o += w.into();
            }
        }
        let inv = 1.0 / grams.len() as f64;
        out.iter_mut().for_each(|o| *o *= inv);
    }

    pub fn activations(&self, grams: &[u32]) -> Activations {
        let mut embedding = Vec::with_capacity(self.dim);
        self.embed(grams, &mut embedding);
        let mut pre_hidden = [0.0; HIDDEN];
        let mut hidden = [0.0; HIDDEN];
        for j in 0..HIDDEN {
            let row = &self.w1[j * self.dim..(j + 1) * self.dim];
            let mut acc: f64 = self.b1[j].into();
            for (&w, &e) in row.iter().zip(&embedding) {
                acc += w.into() * e;
            }
            pre_hidden[j] = acc;
            hidden[j] = acc.max(0.0);
        }
        let mut logits = [0.0; OUTPUTS];
        for (k, logit) in logits.iter_mut().enumerate() {
            let row = &self.w2[k * HIDDEN..(k + 1) * HIDDEN];
            let mut acc: f64 = self.b2[k].into();
            for (&w, &h) in row.iter().zip(&hidden) {
                acc += w.into() * h;
            }
            *logit = acc;
        }
        Activations {
            embedding,
            pre_hidden,
            hidden,
            logits,
        }
    }

    pub fn probabilities(&self, grams: &[u32]) -> [f64; OUTPUTS] {
        self.activations(grams).logits.map(sigmoid)
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Languages at or above `threshold`, or `{other}` if there are none.
pub fn labels_from_probabilities(p: &[f64; OUTPUTS], threshold: f64) -> LabelSet {
    let accepted = Language::SCANDINAVIAN
        .into_iter()
        .zip(p)
        .filter(|(_, &pi)| pi >= threshold)
        .map(|(l, _)| l);
    LabelSet::from_languages(accepted).unwrap_or(LabelSet::OTHER)
}

/// The single most probable label: the argmax language if it reaches the
/// threshold, `other` otherwise. Always a member of
/// [`labels_from_probabilities`] for the same inputs.
pub fn top1_from_probabilities(p: &[f64; OUTPUTS], threshold: f64) -> Language {
    let (best, &pmax) = p
        .iter()
        .enumerate()
        .fold((0, &p[0]), |acc, (i, v)| if *v > *acc.1 { (i, v) } else { acc });
    if pmax >= threshold {
        Language::SCANDINAVIAN[best]
    } else {
        Language::Other
    }
}

/// A trained classifier. Immutable once built; share freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct FastModel {
    pub featurizer: FeaturizerConfig,
    /// Applied by [`FastModel::classify`] before featurization.
    pub normalize: NormalizeConfig,
    /// `bucket_count × embed_dim`, row-major.
    pub embeddings: Vec<f32>,
    /// `HIDDEN × embed_dim`, row-major.
    pub w1: Vec<f32>,
    pub b1: Vec<f32>,
    /// `OUTPUTS × HIDDEN`, row-major.
    pub w2: Vec<f32>,
    pub b2: Vec<f32>,
    pub threshold: f64,
}

impl FastModel {
    /// All weights zero: every output is exactly 0.5.
    pub fn zeros(featurizer: FeaturizerConfig) -> Result<Self, ModelError> {
        featurizer.validate()?;
        let d = featurizer.embed_dim;
        Ok(FastModel {
            featurizer,
            normalize: NormalizeConfig::raw(),
            embeddings: vec![0.0; featurizer.bucket_count * d],
            w1: vec![0.0; HIDDEN * d],
            b1: vec![0.0; HIDDEN],
            w2: vec![0.0; OUTPUTS * HIDDEN],
            b2: vec![0.0; OUTPUTS],
            threshold: 0.5,
        })
    }

    /// Random initialization: embeddings uniform in ±1/embed_dim, dense
    /// layers Glorot-uniform, biases zero.
    pub fn init(featurizer: FeaturizerConfig, seed: u64) -> Result<Self, ModelError> {
        let mut m = Self::zeros(featurizer)?;
        let d = featurizer.embed_dim;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fill = |v: &mut [f32], bound: f64, rng: &mut ChaCha8Rng| {
            let dist = Uniform::new_inclusive(-bound, bound).expect("finite bound");
            v.iter_mut().for_each(|x| *x = dist.sample(rng) as f32);
        };
        fill(&mut m.embeddings, 1.0 / d as f64, &mut rng);
        fill(&mut m.w1, (6.0 / (d + HIDDEN) as f64).sqrt(), &mut rng);
        fill(&mut m.w2, (6.0 / (HIDDEN + OUTPUTS) as f64).sqrt(), &mut rng);
        Ok(m)
    }

    pub fn embed_dim(&self) -> usize {
        self.featurizer.embed_dim
    }

    pub fn head_parameter_count(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    pub fn embedding_parameter_count(&self) -> usize {
        self.embeddings.len()
    }

    /// Check array shapes, weight finiteness and the threshold range.
    pub fn validate(&self) -> Result<(), ModelError> {
        self.featurizer.validate()?;
        let d = self.embed_dim();
        let shapes = [
            ("embeddings", self.embeddings.len(), self.featurizer.bucket_count * d),
            ("w1", self.w1.len(), HIDDEN * d),
            ("b1", self.b1.len(), HIDDEN),
            ("w2", self.w2.len(), OUTPUTS * HIDDEN),
            ("b2", self.b2.len(), OUTPUTS),
        ];
        for (name, got, want) in shapes {
            if got != want {
                return Err(ModelError::Config(format!("{name} has {got} values, expected {want}")));
            }
        }
        let all = [&self.embeddings, &self.w1, &self.b1, &self.w2, &self.b2];
        if all.iter().any(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(ModelError::Config("non-finite weight".into()));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(ModelError::Config(format!(
                "threshold {} not in (0,1)",
                self.threshold
            )));
        }
        Ok(())
    }

    pub(crate) fn weights(&self) -> Weights<'_, f32> {
        Weights {
            dim: self.embed_dim(),
            embeddings: &self.embeddings,
            w1: &self.w1,
            b1: &self.b1,
            w2: &self.w2,
            b2: &self.b2,
        }
    }

    /// Output probabilities for already-featurized input.
    pub fn forward_grams(&self, grams: &[u32]) -> [f64; OUTPUTS] {
        self.weights().probabilities(grams)
    }

    /// Output probabilities (da, nb, nn, sv) for already-normalized text.
    pub fn forward(&self, text: &str) -> [f64; OUTPUTS] {
        self.forward_grams(&self.featurizer.featurize(text))
    }

    /// Label set for already-normalized text.
    pub fn predict(&self, text: &str) -> LabelSet {
        labels_from_probabilities(&self.forward(text), self.threshold)
    }

    /// Normalize, featurize and predict raw text. Returns the label set and
    /// the top-1 label.
    pub fn classify(&self, raw: &str) -> (LabelSet, Language) {
        let p = if self.normalize.is_identity() {
            self.forward(raw)
        } else {
            self.forward(&normalize(raw, &self.normalize))
        };
        (
            labels_from_probabilities(&p, self.threshold),
            top1_from_probabilities(&p, self.threshold),
        )
    }

    /// Probabilities for raw text, normalizing first.
    pub fn probabilities(&self, raw: &str) -> [f64; OUTPUTS] {
        self.forward(&normalize(raw, &self.normalize))
    }
}
