//! Finite-difference verification of the analytic gradients.

use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::train::{batch_gradient, Example, Params};
use super::{FastModel, FeaturizerConfig, ModelError};
use crate::labels::LabeledSentence;

/// Central-difference step.
pub const STEP: f64 = 1e-4;
/// Denominator floor for the relative error.
const FLOOR: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_relative_error: f64,
    /// Parameter that produced the maximum, e.g. `w1[12]`.
    pub worst: String,
    pub checked: usize,
}

/// Relative error `|a - n| / max(|a|, |n|, FLOOR)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(FLOOR)
}

fn batch_loss(params: &Params, batch: &[&Example]) -> f64 {
    batch_gradient(params, batch).0 / batch.len() as f64
}

/// Build a random small model from `seed`, then compare analytic gradients
/// of the mean batch loss against central differences for every dense
/// parameter and every touched embedding value.
pub fn gradient_check(
    fcfg: &FeaturizerConfig,
    batch: &[LabeledSentence],
    seed: u64,
) -> Result<GradCheckReport, ModelError> {
    fcfg.validate()?;
    if fcfg.bucket_count > 64 || fcfg.embed_dim > 8 {
        return Err(ModelError::Config(
            "gradient check needs bucket_count <= 64 and embed_dim <= 8".into(),
        ));
    }
    if batch.is_empty() {
        return Err(ModelError::Config("gradient check needs a non-empty batch".into()));
    }

    let model = FastModel::init(*fcfg, seed)?;
    let mut params = Params::from_model(&model);
    // Larger embeddings and random biases keep hidden units away from the
    // ReLU kink and make the gradients non-trivial.
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let emb = Uniform::new_inclusive(-1.0, 1.0).expect("bounds");
    params.embeddings.iter_mut().for_each(|x| *x = emb.sample(&mut rng));
    let bias = Uniform::new_inclusive(-0.3, 0.3).expect("bounds");
    params.b1.iter_mut().for_each(|x| *x = bias.sample(&mut rng));
    params.b2.iter_mut().for_each(|x| *x = bias.sample(&mut rng));

    let examples: Vec<Example> = batch
        .iter()
        .map(|s| Example {
            grams: fcfg.featurize(&s.text),
            target: s.labels.target_vector(),
        })
        .collect();
    let refs: Vec<&Example> = examples.iter().collect();
    clear_kinks(&mut params, &examples);

    let (_, mut grads) = batch_gradient(&params, &refs);
    grads.scale(1.0 / refs.len() as f64);

    let mut report = GradCheckReport {
        max_relative_error: 0.0,
        worst: String::new(),
        checked: 0,
    };
    let mut check = |name: String, analytic: f64, numeric: f64| {
        let err = relative_error(analytic, numeric);
        report.checked += 1;
        if err > report.max_relative_error || report.worst.is_empty() {
            report.max_relative_error = err.max(report.max_relative_error);
            report.worst = name;
        }
    };

    macro_rules! sweep {
        ($field:ident, $analytic:expr) => {
            for i in 0..params.$field.len() {
                let orig = params.$field[i];
                params.$field[i] = orig + STEP;
                let up = batch_loss(&params, &refs);
                params.$field[i] = orig - STEP;
                let down = batch_loss(&params, &refs);
                params.$field[i] = orig;
                let numeric = (up - down) / (2.0 * STEP);
                check(format!("{}[{i}]", stringify!($field)), $analytic[i], numeric);
            }
        };
    }
    sweep!(w1, grads.w1);
    sweep!(b1, grads.b1);
    sweep!(w2, grads.w2);
    sweep!(b2, grads.b2);

    let dim = params.dim;
    for &row in &grads.rows {
        let analytic = grads.embedding_row(row);
        for (i, &a) in analytic.iter().enumerate() {
            let at = row as usize * dim + i;
            let orig = params.embeddings[at];
            params.embeddings[at] = orig + STEP;
            let up = batch_loss(&params, &refs);
            params.embeddings[at] = orig - STEP;
            let down = batch_loss(&params, &refs);
            params.embeddings[at] = orig;
            check(format!("embeddings[{row}][{i}]"), a, (up - down) / (2.0 * STEP));
        }
    }
    Ok(report)
}

/// Minimum distance of every hidden pre-activation from the ReLU kink.
const KINK_MARGIN: f64 = 1e-2;

/// Shift hidden biases until no example sits within `KINK_MARGIN` of a
/// kink, where central differences straddle the hinge.
fn clear_kinks(params: &mut Params, examples: &[Example]) {
    for _ in 0..100 {
        let mut moved = false;
        for ex in examples {
            let pre = params.weights().activations(&ex.grams).pre_hidden;
            for (j, &z) in pre.iter().enumerate() {
                if z.abs() < KINK_MARGIN {
                    params.b1[j] += 2.0 * KINK_MARGIN;
                    moved = true;
                }
            }
        }
        if !moved {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::LabelSet;

    fn batch() -> Vec<LabeledSentence> {
        [("hej med dig", "da"), ("eg er her", "nn,nb"), ("hello", "other"), ("", "sv")]
            .iter()
            .map(|(t, l)| LabeledSentence {
                text: t.to_string(),
                labels: l.parse::<LabelSet>().unwrap(),
                source: None,
            })
            .collect()
    }

    #[test]
    fn small_model_passes() {
        let cfg = FeaturizerConfig {
            bucket_count: 64,
            embed_dim: 8,
            ..Default::default()
        };
        let r = gradient_check(&cfg, &batch(), 1).unwrap();
        assert!(r.max_relative_error < 1e-4, "{r:?}");
        assert!(r.checked > 64 * 8);
    }

    #[test]
    fn refuses_large_models() {
        assert!(gradient_check(&FeaturizerConfig::default(), &batch(), 0).is_err());
    }

    #[test]
    fn relative_error_floor() {
        assert_eq!(relative_error(0.0, 0.0), 0.0);
        assert!((relative_error(1.0, 1.0001) - 1e-4 / 1.0001).abs() < 1e-12);
    }
}
