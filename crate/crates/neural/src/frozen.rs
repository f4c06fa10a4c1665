//! Frozen-encoder transfer: the pretrained BERT stays fixed and only a
//! bidirectional GRU head learns the mapping to complexity scores.
//!
//! Token states are precomputed once per sentence (the encoder cannot
//! change), so epochs only pay for the head. The kept weights are the ones
//! with the best validation loss, falling back to training loss when the
//! corpus is too small to split.

use crate::artifact::{HeadKind, NeuralMode, NeuralModel, TrainLog};
use crate::encoder::Encoder;
use crate::error::NeuralError;
use crate::head::gru_head;
use crate::vars::{mix, restore_vars, seed_vars, snapshot_vars};
use candle_core::{DType, Tensor};
use candle_nn::{AdamW, Optimizer, ParamsAdamW, VarBuilder, VarMap};
use lesbar_core::corpus::{validate_corpus, Corpus, LabeledSentence};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Batch size for the one-off feature precomputation.
const EMBED_BATCH: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrozenConfig {
    pub gru_hidden: usize,
    pub gru_layers: usize,
    pub dropout: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub max_seq_len: usize,
    /// Held-out fraction used to pick the best epoch; 0 disables the split.
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for FrozenConfig {
    fn default() -> Self {
        FrozenConfig {
            gru_hidden: 256,
            gru_layers: 2,
            dropout: 0.5,
            learning_rate: 1e-3,
            batch_size: 128,
            epochs: 20,
            max_seq_len: 128,
            validation_fraction: 0.1,
            seed: 0,
        }
    }
}

impl FrozenConfig {
    pub fn validate(&self) -> Result<(), NeuralError> {
        let bad = |msg: &str| Err(NeuralError::InvalidConfig(msg.into()));
        if self.gru_hidden == 0 || self.gru_layers == 0 {
            return bad("gru_hidden and gru_layers must be at least 1");
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad("dropout must be in [0, 1)");
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return bad("learning_rate must be positive");
        }
        if self.batch_size == 0 || self.epochs == 0 {
            return bad("batch_size and epochs must be at least 1");
        }
        if self.max_seq_len < 3 {
            return bad("max_seq_len must fit [CLS], a token and [SEP]");
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return bad("validation_fraction must be in [0, 1)");
        }
        Ok(())
    }
}

/// Sentences in id order, so training is invariant to input permutation.
pub(crate) fn canonical_items(corpus: &Corpus) -> Vec<&LabeledSentence> {
    let mut items: Vec<&LabeledSentence> = corpus.items.iter().collect();
    items.sort_by(|a, b| a.sentence.id.cmp(&b.sentence.id));
    items
}

/// Precomputed token states for one sentence.
struct Embedded {
    states: Tensor,
    len: usize,
    target: f32,
}

fn embed_corpus(
    encoder: &Encoder,
    items: &[&LabeledSentence],
    max_seq_len: usize,
) -> Result<Vec<Embedded>, NeuralError> {
    let mut out = Vec::with_capacity(items.len());
    for chunk in items.chunks(EMBED_BATCH) {
        let texts: Vec<&str> = chunk.iter().map(|l| l.sentence.text.as_str()).collect();
        let (hidden, lengths) = encoder.embed(&texts, max_seq_len)?;
        for (i, item) in chunk.iter().enumerate() {
            let len = lengths[i];
            let states = hidden.narrow(0, i, 1)?.squeeze(0)?.narrow(0, 0, len)?.detach();
            out.push(Embedded {
                states,
                len,
                target: item.mos_complexity as f32,
            });
        }
    }
    Ok(out)
}

/// Zero-pad the selected rows to a common length and stack them. Padding is
/// harmless downstream because the head never reads past each row's length.
fn batch_features(
    features: &[Embedded],
    picks: &[usize],
) -> Result<(Tensor, Vec<usize>, Tensor), NeuralError> {
    let width = picks
        .iter()
        .map(|&i| features[i].len)
        .max()
        .expect("non-empty batch");
    let mut rows = Vec::with_capacity(picks.len());
    let mut lengths = Vec::with_capacity(picks.len());
    let mut targets = Vec::with_capacity(picks.len());
    for &i in picks {
        let f = &features[i];
        let row = if f.len == width {
            f.states.clone()
        } else {
            let hidden = f.states.dim(1)?;
            let pad = Tensor::zeros((width - f.len, hidden), DType::F32, f.states.device())?;
            Tensor::cat(&[&f.states, &pad], 0)?
        };
        rows.push(row);
        lengths.push(f.len);
        targets.push(f.target);
    }
    let x = Tensor::stack(&rows, 0)?;
    let device = x.device().clone();
    let n = targets.len();
    let y = Tensor::from_vec(targets, (n,), &device)?;
    Ok((x, lengths, y))
}

fn split_validation(n: usize, fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..n).collect();
    if fraction <= 0.0 || n < 2 {
        return (order, Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let n_val = (((n as f64) * fraction).round() as usize).clamp(1, n - 1);
    let val = order.split_off(n - n_val);
    (order, val)
}

/// Train the GRU head over frozen encoder features and package the result.
pub fn train_frozen(
    encoder_dir: impl AsRef<Path>,
    corpus: &Corpus,
    config: &FrozenConfig,
) -> Result<NeuralModel, NeuralError> {
    config.validate()?;
    validate_corpus(corpus, 1)?;
    let encoder = Encoder::load_frozen(encoder_dir)?;
    let max_seq_len = encoder.clamp_seq_len(config.max_seq_len);

    let items = canonical_items(corpus);
    let features = embed_corpus(&encoder, &items, max_seq_len)?;
    let (train_idx, val_idx) =
        split_validation(features.len(), config.validation_fraction, mix(config.seed, 0));

    let head_vars = VarMap::new();
    let vb = VarBuilder::from_varmap(&head_vars, DType::F32, encoder.device());
    let head = gru_head(
        vb,
        encoder.hidden_size,
        config.gru_hidden,
        config.gru_layers,
        config.dropout as f32,
    )?;
    seed_vars(&head_vars, mix(config.seed, 1), (config.gru_hidden as f64).powf(-0.5))?;

    // Adam as published: AdamW with the decoupled decay turned off.
    let mut optimizer = AdamW::new(
        head_vars.all_vars(),
        ParamsAdamW {
            lr: config.learning_rate,
            weight_decay: 0.0,
            ..Default::default()
        },
    )?;

    let mean_loss = |picks: &[usize], head: &crate::head::GruHead| -> Result<f64, NeuralError> {
        let mut sum = 0.0;
        for chunk in picks.chunks(config.batch_size) {
            let (x, lengths, y) = batch_features(&features, chunk)?;
            let pred = head.forward(&x, &lengths, false)?;
            let loss = candle_nn::loss::mse(&pred, &y)?;
            sum += loss.to_scalar::<f32>()? as f64 * chunk.len() as f64;
        }
        Ok(sum / picks.len() as f64)
    };

    let mut train_loss = Vec::with_capacity(config.epochs);
    let mut validation_loss = Vec::new();
    let mut best = f64::INFINITY;
    let mut best_epoch = 0;
    let mut best_weights = snapshot_vars(&head_vars)?;
    for epoch in 0..config.epochs {
        let mut order = train_idx.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(mix(config.seed, 2 + epoch as u64));
        order.shuffle(&mut rng);

        let mut sum = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let (x, lengths, y) = batch_features(&features, chunk)?;
            let pred = head.forward(&x, &lengths, true)?;
            let loss = candle_nn::loss::mse(&pred, &y)?;
            optimizer.backward_step(&loss)?;
            sum += loss.to_scalar::<f32>()? as f64 * chunk.len() as f64;
        }
        let epoch_train = sum / train_idx.len() as f64;
        train_loss.push(epoch_train);

        let selection = if val_idx.is_empty() {
            epoch_train
        } else {
            let v = mean_loss(&val_idx, &head)?;
            validation_loss.push(v);
            v
        };
        if selection < best {
            best = selection;
            best_epoch = epoch;
            best_weights = snapshot_vars(&head_vars)?;
        }
    }
    restore_vars(&head_vars, &best_weights)?;

    Ok(NeuralModel {
        mode: NeuralMode::Frozen,
        encoder,
        head: HeadKind::Gru(head),
        head_vars,
        encoder_vars: None,
        frozen_config: Some(config.clone()),
        fine_tune_config: None,
        max_seq_len,
        train_log: TrainLog {
            train_loss,
            validation_loss,
            best_epoch,
        },
    })
}
