//! Minibatch gradient descent on mean binary cross-entropy.
//!
//! Training keeps `f64` master copies of all parameters and rounds to `f32`
//! when a checkpoint is taken. Embedding gradients are sparse: only rows
//! named by a batch's n-grams are touched.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    labels_from_probabilities, sigmoid, FastModel, FeaturizerConfig, ModelError, Weights, HIDDEN,
    OUTPUTS,
};
use crate::labels::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionMetric {
    /// Exact-match accuracy on the validation set (higher is better).
    ExactMatch,
    /// Mean binary cross-entropy on the validation set (lower is better).
    ValidLoss,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Optional heavy-ball momentum on the dense layers (0 disables it);
    /// embeddings always use plain SGD.
    pub momentum: f64,
    pub seed: u64,
    /// Steps between validation evaluations.
    pub eval_interval: usize,
    /// Evaluations without improvement before stopping.
    pub patience: usize,
    pub selection_metric: SelectionMetric,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 10,
            batch_size: 32,
            learning_rate: 0.5,
            momentum: 0.0,
            seed: 42,
            eval_interval: 500,
            patience: 10,
            selection_metric: SelectionMetric::ExactMatch,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: &str| Err(ModelError::Config(m.to_string()));
        if self.epochs == 0 || self.batch_size == 0 || self.eval_interval == 0 || self.patience == 0
        {
            return bad("epochs, batch_size, eval_interval and patience must be positive");
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be finite and non-negative");
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad("momentum must be in [0,1)");
        }
        Ok(())
    }
}

/// A featurized training example.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub grams: Vec<u32>,
    pub target: [f64; OUTPUTS],
}

impl Example {
    pub fn from_dataset(d: &Dataset, cfg: &FeaturizerConfig) -> Vec<Example> {
        d.iter()
            .map(|item| Example {
                grams: cfg.featurize(&item.text),
                target: item.labels.target_vector(),
            })
            .collect()
    }
}

/// `f64` parameters, laid out like [`FastModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub dim: usize,
    pub embeddings: Vec<f64>,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

fn widen(v: &[f32]) -> Vec<f64> {
    v.iter().map(|&x| f64::from(x)).collect()
}

fn narrow(v: &[f64]) -> Vec<f32> {
    v.iter().map(|&x| x as f32).collect()
}

impl Params {
    pub fn from_model(m: &FastModel) -> Self {
        Params {
            dim: m.embed_dim(),
            embeddings: widen(&m.embeddings),
            w1: widen(&m.w1),
            b1: widen(&m.b1),
            w2: widen(&m.w2),
            b2: widen(&m.b2),
        }
    }

    /// Round into `template`'s configuration.
    pub fn to_model(&self, template: &FastModel) -> FastModel {
        FastModel {
            embeddings: narrow(&self.embeddings),
            w1: narrow(&self.w1),
            b1: narrow(&self.b1),
            w2: narrow(&self.w2),
            b2: narrow(&self.b2),
            ..template.clone()
        }
    }

    pub(crate) fn weights(&self) -> Weights<'_, f64> {
        Weights {
            dim: self.dim,
            embeddings: &self.embeddings,
            w1: &self.w1,
            b1: &self.b1,
            w2: &self.w2,
            b2: &self.b2,
        }
    }
}

/// Summed gradients of a batch.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub dim: usize,
    /// Touched embedding rows, in first-touch order.
    pub rows: Vec<u32>,
    /// `rows.len() × dim`, aligned with `rows`.
    pub row_grads: Vec<f64>,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
    row_index: HashMap<u32, usize>,
}

impl Gradients {
    fn new(dim: usize) -> Self {
        Gradients {
            dim,
            rows: Vec::new(),
            row_grads: Vec::new(),
            w1: vec![0.0; HIDDEN * dim],
            b1: vec![0.0; HIDDEN],
            w2: vec![0.0; OUTPUTS * HIDDEN],
            b2: vec![0.0; OUTPUTS],
            row_index: HashMap::new(),
        }
    }

    fn row_mut(&mut self, bucket: u32) -> &mut [f64] {
        let dim = self.dim;
        let idx = *self.row_index.entry(bucket).or_insert_with(|| {
            self.rows.push(bucket);
            self.row_grads.resize(self.row_grads.len() + dim, 0.0);
            self.rows.len() - 1
        });
        &mut self.row_grads[idx * dim..(idx + 1) * dim]
    }

    /// Gradient of one embedding row; zeros for untouched rows.
    pub fn embedding_row(&self, bucket: u32) -> Vec<f64> {
        match self.row_index.get(&bucket) {
            Some(&i) => self.row_grads[i * self.dim..(i + 1) * self.dim].to_vec(),
            None => vec![0.0; self.dim],
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for v in [
            &mut self.row_grads,
            &mut self.w1,
            &mut self.b1,
            &mut self.w2,
            &mut self.b2,
        ] {
            v.iter_mut().for_each(|x| *x *= factor);
        }
    }
}

/// Mean BCE over the four outputs, from logits.
fn bce_from_logits(logits: &[f64; OUTPUTS], target: &[f64; OUTPUTS]) -> f64 {
    logits
        .iter()
        .zip(target)
        .map(|(&z, &t)| z.max(0.0) - z * t + (-z.abs()).exp().ln_1p())
        .sum::<f64>()
        / OUTPUTS as f64
}

/// Summed loss and summed gradients over `batch` (no division by batch size).
pub fn batch_gradient(params: &Params, batch: &[&Example]) -> (f64, Gradients) {
    let w = params.weights();
    let dim = params.dim;
    let mut grads = Gradients::new(dim);
    let mut loss = 0.0;
    let mut d_embed = vec![0.0; dim];

    for ex in batch {
        let act = w.activations(&ex.grams);
        loss += bce_from_logits(&act.logits, &ex.target);

        let mut d_logits = [0.0; OUTPUTS];
        for k in 0..OUTPUTS {
            d_logits[k] = (sigmoid(act.logits[k]) - ex.target[k]) / OUTPUTS as f64;
        }
        let mut d_hidden = [0.0; HIDDEN];
        for k in 0..OUTPUTS {
            grads.b2[k] += d_logits[k];
            let row = &mut grads.w2[k * HIDDEN..(k + 1) * HIDDEN];
            for j in 0..HIDDEN {
                row[j] += d_logits[k] * act.hidden[j];
                d_hidden[j] += params.w2[k * HIDDEN + j] * d_logits[k];
            }
        }
        d_embed.iter_mut().for_each(|x| *x = 0.0);
        for j in 0..HIDDEN {
            if act.pre_hidden[j] <= 0.0 {
                continue;
            }
            let d_pre = d_hidden[j];
            grads.b1[j] += d_pre;
            let g_row = &mut grads.w1[j * dim..(j + 1) * dim];
            let w_row = &params.w1[j * dim..(j + 1) * dim];
            for i in 0..dim {
                g_row[i] += d_pre * act.embedding[i];
                d_embed[i] += w_row[i] * d_pre;
            }
        }
        if ex.grams.is_empty() {
            continue;
        }
        let inv = 1.0 / ex.grams.len() as f64;
        for &g in &ex.grams {
            let row = grads.row_mut(g);
            for (r, &de) in row.iter_mut().zip(&d_embed) {
                *r += de * inv;
            }
        }
    }
    (loss, grads)
}

/// Mean per-sentence loss of `model` on `d` (text taken as-is).
pub fn mean_loss(model: &FastModel, d: &Dataset) -> f64 {
    if d.is_empty() {
        return 0.0;
    }
    let w = model.weights();
    let total: f64 = d
        .iter()
        .map(|item| {
            let act = w.activations(&model.featurizer.featurize(&item.text));
            bce_from_logits(&act.logits, &item.labels.target_vector())
        })
        .sum();
    total / d.len() as f64
}

fn examples_loss<W: Copy + Into<f64>>(w: &Weights<'_, W>, examples: &[Example]) -> f64 {
    if examples.is_empty() {
        return 0.0;
    }
    examples
        .iter()
        .map(|ex| bce_from_logits(&w.activations(&ex.grams).logits, &ex.target))
        .sum::<f64>()
        / examples.len() as f64
}

fn exact_match(model: &FastModel, examples: &[Example]) -> f64 {
    if examples.is_empty() {
        return 0.0;
    }
    let hits = examples
        .iter()
        .filter(|ex| {
            let p = model.forward_grams(&ex.grams);
            let predicted = labels_from_probabilities(&p, model.threshold);
            predicted.target_vector() == ex.target
        })
        .count();
    hits as f64 / examples.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalPoint {
    pub step: usize,
    pub epoch: usize,
    /// Mean batch loss since the previous evaluation.
    pub train_loss: f64,
    pub valid_loss: f64,
    pub valid_exact_match: f64,
    pub improved: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainHistory {
    /// Mean training loss before the first update.
    pub initial_loss: f64,
    /// Mean batch loss over each completed epoch.
    pub epoch_losses: Vec<f64>,
    pub evals: Vec<EvalPoint>,
    /// Step of the returned checkpoint.
    pub best_step: usize,
    pub steps: usize,
    pub stopped_early: bool,
}

/// Initialize from `tcfg.seed` and train.
pub fn train(
    train_set: &Dataset,
    valid_set: &Dataset,
    fcfg: &FeaturizerConfig,
    tcfg: &TrainConfig,
) -> Result<(FastModel, TrainHistory), ModelError> {
    let init = FastModel::init(*fcfg, tcfg.seed)?;
    train_from(init, train_set, valid_set, tcfg)
}

struct Selector {
    metric: SelectionMetric,
    best: Option<f64>,
}

impl Selector {
    fn offer(&mut self, exact: f64, loss: f64) -> bool {
        let (score, better) = match self.metric {
            SelectionMetric::ExactMatch => (exact, self.best.is_none_or(|b| exact > b)),
            SelectionMetric::ValidLoss => (loss, self.best.is_none_or(|b| loss < b)),
        };
        if better {
            self.best = Some(score);
        }
        better
    }
}

/// Continue training an existing model. Returns the best checkpoint by the
/// selection metric (or the last one when `valid_set` is empty).
pub fn train_from(
    model: FastModel,
    train_set: &Dataset,
    valid_set: &Dataset,
    tcfg: &TrainConfig,
) -> Result<(FastModel, TrainHistory), ModelError> {
    tcfg.validate()?;
    model.validate()?;
    if train_set.is_empty() {
        return Err(ModelError::EmptyTrainingSet);
    }
    let train_ex = Example::from_dataset(train_set, &model.featurizer);
    let valid_ex = Example::from_dataset(valid_set, &model.featurizer);

    let mut params = Params::from_model(&model);
    let mut history = TrainHistory {
        initial_loss: examples_loss(&params.weights(), &train_ex),
        ..Default::default()
    };
    if !history.initial_loss.is_finite() {
        return Err(ModelError::NonFiniteLoss {
            step: 0,
            epoch: 0,
            loss: history.initial_loss,
            learning_rate: tcfg.learning_rate,
        });
    }

    let mut selector = Selector {
        metric: tcfg.selection_metric,
        best: None,
    };
    let mut best_model = model.clone();
    let mut since_improved = 0;

    let mut velocity = Params {
        dim: params.dim,
        embeddings: Vec::new(),
        w1: vec![0.0; params.w1.len()],
        b1: vec![0.0; params.b1.len()],
        w2: vec![0.0; params.w2.len()],
        b2: vec![0.0; params.b2.len()],
    };
    let mut order: Vec<usize> = (0..train_ex.len()).collect();
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(tcfg.seed);
    shuffle_rng.set_stream(1);

    let lr = tcfg.learning_rate;
    let mut step = 0;
    let mut window_loss = 0.0;
    let mut window_items = 0usize;
    let mut last_eval_step = None;

    'epochs: for epoch in 0..tcfg.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(tcfg.batch_size) {
            let batch: Vec<&Example> = chunk.iter().map(|&i| &train_ex[i]).collect();
            let (loss_sum, mut grads) = batch_gradient(&params, &batch);
            if !loss_sum.is_finite() {
                return Err(ModelError::NonFiniteLoss {
                    step,
                    epoch,
                    loss: loss_sum / batch.len() as f64,
                    learning_rate: lr,
                });
            }
            grads.scale(1.0 / batch.len() as f64);
            apply_update(&mut params, &mut velocity, &grads, lr, tcfg.momentum);

            step += 1;
            epoch_loss += loss_sum;
            window_loss += loss_sum;
            window_items += batch.len();

            if step % tcfg.eval_interval == 0 && !valid_ex.is_empty() {
                let checkpoint = params.to_model(&model);
                let improved = evaluate(
                    &checkpoint,
                    &valid_ex,
                    &mut selector,
                    &mut history,
                    step,
                    epoch,
                    window_loss / window_items as f64,
                );
                window_loss = 0.0;
                window_items = 0;
                last_eval_step = Some(step);
                if improved {
                    best_model = checkpoint;
                    history.best_step = step;
                    since_improved = 0;
                } else {
                    since_improved += 1;
                    if since_improved >= tcfg.patience {
                        history.epoch_losses.push(epoch_loss / train_ex.len() as f64);
                        history.stopped_early = true;
                        break 'epochs;
                    }
                }
            }
        }
        history.epoch_losses.push(epoch_loss / train_ex.len() as f64);
    }
    history.steps = step;

    if valid_ex.is_empty() {
        history.best_step = step;
        return Ok((params.to_model(&model), history));
    }
    if !history.stopped_early && last_eval_step != Some(step) {
        let checkpoint = params.to_model(&model);
        let train_loss = if window_items > 0 {
            window_loss / window_items as f64
        } else {
            0.0
        };
        let epoch = history.epoch_losses.len().saturating_sub(1);
        if evaluate(&checkpoint, &valid_ex, &mut selector, &mut history, step, epoch, train_loss) {
            best_model = checkpoint;
            history.best_step = step;
        }
    }
    Ok((best_model, history))
}

fn evaluate(
    checkpoint: &FastModel,
    valid: &[Example],
    selector: &mut Selector,
    history: &mut TrainHistory,
    step: usize,
    epoch: usize,
    train_loss: f64,
) -> bool {
    let valid_loss = examples_loss(&checkpoint.weights(), valid);
    let valid_exact_match = exact_match(checkpoint, valid);
    let improved = selector.offer(valid_exact_match, valid_loss);
    log::info!(
        "step {step} epoch {epoch}: train loss {train_loss:.4}, valid loss {valid_loss:.4}, exact match {:.2}%{}",
        100.0 * valid_exact_match,
        if improved { " *" } else { "" }
    );
    history.evals.push(EvalPoint {
        step,
        epoch,
        train_loss,
        valid_loss,
        valid_exact_match,
        improved,
    });
    improved
}

fn apply_update(params: &mut Params, velocity: &mut Params, grads: &Gradients, lr: f64, mu: f64) {
    let dense = [
        (&mut params.w1, &mut velocity.w1, &grads.w1),
        (&mut params.b1, &mut velocity.b1, &grads.b1),
        (&mut params.w2, &mut velocity.w2, &grads.w2),
        (&mut params.b2, &mut velocity.b2, &grads.b2),
    ];
    for (p, v, g) in dense {
        for ((p, v), g) in p.iter_mut().zip(v.iter_mut()).zip(g) {
            *v = mu * *v + g;
            *p -= lr * *v;
        }
    }
    let dim = params.dim;
    for (i, &row) in grads.rows.iter().enumerate() {
        let p = &mut params.embeddings[row as usize * dim..(row as usize + 1) * dim];
        let g = &grads.row_grads[i * dim..(i + 1) * dim];
        for (p, g) in p.iter_mut().zip(g) {
            *p -= lr * g;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::{LabelSet, LabeledSentence, Language, Split};

    fn toy_dataset() -> Dataset {
        let rows = [
            ("jeg har ikke noget", "da"),
            ("hvad laver du", "da"),
            ("eg veit ikkje kva", "nn"),
            ("kva gjer du no", "nn"),
            ("jag vet inte vad", "sv"),
            ("vad gör du nu", "sv"),
            ("what are you doing", "other"),
            ("je ne sais pas", "other"),
            ("hva gjør du nå", "nb"),
            ("jeg vet ikke hva", "nb"),
        ];
        Dataset::new(
            Split::Train,
            rows.iter()
                .map(|(t, l)| LabeledSentence::new(*t, l.parse::<LabelSet>().unwrap()).unwrap())
                .collect(),
        )
    }

    fn small() -> FeaturizerConfig {
        FeaturizerConfig {
            bucket_count: 1 << 10,
            embed_dim: 16,
            ..Default::default()
        }
    }

    #[test]
    fn loss_decreases_after_one_epoch() {
        let d = toy_dataset();
        let tcfg = TrainConfig {
            epochs: 1,
            batch_size: 2,
            ..Default::default()
        };
        let init = FastModel::init(small(), tcfg.seed).unwrap();
        let before = mean_loss(&init, &d);
        let (m, hist) = train(&d, &Dataset::default(), &small(), &tcfg).unwrap();
        assert!((hist.initial_loss - before).abs() < 1e-9);
        assert!(mean_loss(&m, &d) < before);
    }

    #[test]
    fn same_seed_same_weights() {
        let d = toy_dataset();
        let tcfg = TrainConfig {
            epochs: 3,
            batch_size: 3,
            eval_interval: 2,
            ..Default::default()
        };
        let (a, ha) = train(&d, &d, &small(), &tcfg).unwrap();
        let (b, hb) = train(&d, &d, &small(), &tcfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(ha, hb);
        let (c, _) = train(&d, &d, &small(), &TrainConfig { seed: 7, ..tcfg }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_learning_rate_keeps_weights() {
        let d = toy_dataset();
        let tcfg = TrainConfig {
            epochs: 2,
            learning_rate: 0.0,
            ..Default::default()
        };
        let init = FastModel::init(small(), tcfg.seed).unwrap();
        let (m, _) = train(&d, &Dataset::default(), &small(), &tcfg).unwrap();
        assert_eq!(m, init);
    }

    #[test]
    fn empty_training_set_rejected() {
        let r = train(&Dataset::default(), &Dataset::default(), &small(), &TrainConfig::default());
        assert!(matches!(r, Err(ModelError::EmptyTrainingSet)));
    }

    #[test]
    fn divergence_reported() {
        let d = toy_dataset();
        let mut init = FastModel::init(small(), 1).unwrap();
        init.w2.iter_mut().for_each(|w| *w = 3.0e38);
        init.b1.iter_mut().for_each(|b| *b = 3.0e38);
        let r = train_from(init, &d, &Dataset::default(), &TrainConfig::default());
        assert!(matches!(r, Err(ModelError::NonFiniteLoss { .. })), "{r:?}");
    }

    #[test]
    fn duplicated_sample_doubles_gradient() {
        let m = FastModel::init(small(), 5).unwrap();
        let p = Params::from_model(&m);
        let ex = Example {
            grams: small().featurize("hvad laver du"),
            target: LabelSet::single(Language::Da).target_vector(),
        };
        let (l1, g1) = batch_gradient(&p, &[&ex]);
        let (l2, g2) = batch_gradient(&p, &[&ex, &ex]);
        assert_eq!(l2, 2.0 * l1);
        let doubled = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| *y == 2.0 * *x);
        assert!(doubled(&g1.w1, &g2.w1));
        assert!(doubled(&g1.b1, &g2.b1));
        assert!(doubled(&g1.w2, &g2.w2));
        assert!(doubled(&g1.b2, &g2.b2));
        assert_eq!(g1.rows, g2.rows);
        // Repeated n-grams accumulate in a different order, so rows match
        // only up to rounding.
        assert!(g1
            .row_grads
            .iter()
            .zip(&g2.row_grads)
            .all(|(x, y)| (y - 2.0 * x).abs() <= 1e-12 * x.abs().max(1e-300)));
    }

    #[test]
    fn empty_input_touches_no_embedding_rows() {
        let m = FastModel::init(small(), 5).unwrap();
        let p = Params::from_model(&m);
        let ex = Example {
            grams: Vec::new(),
            target: [1.0, 0.0, 0.0, 1.0],
        };
        let (_, g) = batch_gradient(&p, &[&ex, &ex]);
        assert!(g.rows.is_empty());
        assert!(g.embedding_row(17).iter().all(|&x| x == 0.0));
        assert!(g.b2.iter().any(|&x| x != 0.0));
    }

    #[test]
    fn early_stopping_respects_patience() {
        let d = toy_dataset();
        let tcfg = TrainConfig {
            epochs: 200,
            batch_size: 5,
            eval_interval: 1,
            patience: 3,
            learning_rate: 0.0,
            ..Default::default()
        };
        let (_, hist) = train(&d, &d, &small(), &tcfg).unwrap();
        assert!(hist.stopped_early);
        assert_eq!(hist.evals.len(), 4);
        assert_eq!(hist.best_step, 1);
    }
}
