//! End-to-end fine-tuning: every encoder weight trains together with a
//! pooled-CLS regression head, AdamW over the full parameter set.

use crate::artifact::{HeadKind, NeuralMode, NeuralModel, TrainLog};
use crate::bert::TrainableBert;
use crate::encoder::Encoder;
use crate::error::NeuralError;
use crate::head::pooled_head;
use crate::vars::{mix, seed_vars};
use candle_core::DType;
use candle_nn::{AdamW, Optimizer, ParamsAdamW, VarBuilder, VarMap};
use lesbar_core::corpus::{validate_corpus, Corpus};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FineTuneConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub dropout: f64,
    pub max_seq_len: usize,
    pub seed: u64,
}

impl Default for FineTuneConfig {
    fn default() -> Self {
        FineTuneConfig {
            learning_rate: 5e-5,
            batch_size: 16,
            epochs: 3,
            dropout: 0.1,
            max_seq_len: 128,
            seed: 0,
        }
    }
}

impl FineTuneConfig {
    pub fn validate(&self) -> Result<(), NeuralError> {
        let bad = |msg: &str| Err(NeuralError::InvalidConfig(msg.into()));
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return bad("learning_rate must be positive");
        }
        if self.batch_size == 0 || self.epochs == 0 {
            return bad("batch_size and epochs must be at least 1");
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad("dropout must be in [0, 1)");
        }
        if self.max_seq_len < 3 {
            return bad("max_seq_len must fit [CLS], a token and [SEP]");
        }
        Ok(())
    }
}

/// Fine-tune the whole encoder plus a fresh pooled head on the corpus.
pub fn train_finetune(
    encoder_dir: impl AsRef<Path>,
    corpus: &Corpus,
    config: &FineTuneConfig,
) -> Result<NeuralModel, NeuralError> {
    config.validate()?;
    validate_corpus(corpus, 1)?;
    let mut encoder_vars = VarMap::new();
    let encoder = Encoder::load_trainable(encoder_dir, &mut encoder_vars)?;
    let max_seq_len = encoder.clamp_seq_len(config.max_seq_len);

    // The inference model's forward pass is not differentiable (its fused
    // layer-norm kernel has no backward op), so training steps go through a
    // mirror built over the same variables.
    let vb = VarBuilder::from_varmap(&encoder_vars, DType::F32, encoder.device());
    let vb = match encoder.prefix {
        Some(p) => vb.pp(p),
        None => vb,
    };
    let trainable = TrainableBert::load(vb, &encoder.config)?;

    let head_vars = VarMap::new();
    let vb = VarBuilder::from_varmap(&head_vars, DType::F32, encoder.device());
    let head = pooled_head(vb, encoder.hidden_size, config.dropout as f32)?;
    seed_vars(&head_vars, mix(config.seed, 1), (encoder.hidden_size as f64).powf(-0.5))?;

    let mut all_vars = encoder_vars.all_vars();
    all_vars.extend(head_vars.all_vars());
    let mut optimizer = AdamW::new(
        all_vars,
        ParamsAdamW {
            lr: config.learning_rate,
            ..Default::default()
        },
    )?;

    let items = super::frozen::canonical_items(corpus);
    let mut train_loss = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let mut order: Vec<usize> = (0..items.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(mix(config.seed, 2 + epoch as u64));
        order.shuffle(&mut rng);

        let mut sum = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let texts: Vec<&str> = chunk
                .iter()
                .map(|&i| items[i].sentence.text.as_str())
                .collect();
            let batch = encoder.tokenizer.encode_batch(&texts, max_seq_len);
            let (ids, token_types, mask) =
                encoder.batch_tensors(&batch.ids, &batch.attention_mask)?;
            let hidden = trainable.forward(&ids, &token_types, &mask)?;
            let cls = hidden.narrow(1, 0, 1)?.squeeze(1)?;
            let pred = head.forward(&cls, true)?;
            let targets: Vec<f32> = chunk.iter().map(|&i| items[i].mos_complexity as f32).collect();
            let n = targets.len();
            let y = candle_core::Tensor::from_vec(targets, (n,), encoder.device())?;
            let loss = candle_nn::loss::mse(&pred, &y)?;
            optimizer.backward_step(&loss)?;
            sum += loss.to_scalar::<f32>()? as f64 * chunk.len() as f64;
        }
        train_loss.push(sum / items.len() as f64);
    }

    let best_epoch = config.epochs - 1;
    Ok(NeuralModel {
        mode: NeuralMode::FineTuned,
        encoder,
        head: HeadKind::Pooled(head),
        head_vars,
        encoder_vars: Some(encoder_vars),
        frozen_config: None,
        fine_tune_config: Some(config.clone()),
        max_seq_len,
        train_log: TrainLog {
            train_loss,
            validation_loss: Vec::new(),
            best_epoch,
        },
    })
}
