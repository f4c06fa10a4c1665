//! Transfer-learning complexity scorers over a pretrained German BERT.
//!
//! Two modes, both ending in a single regression output on the 1–7 scale:
//!
//! * **Frozen**: the encoder stays fixed and a bidirectional GRU head
//!   learns from its token states ([`train_frozen`]).
//! * **Fine-tuned**: every encoder weight trains together with a pooled
//!   `[CLS]` head ([`train_finetune`]).
//!
//! Encoders load from checkpoint directories in the standard published
//! layout (`config.json`, `vocab.txt`, `model.safetensors`); point
//! [`ENCODER_ENV`] at one, or generate the miniature test encoder via
//! [`write_toy_encoder`]. Trained models save to artifact directories and
//! implement [`lesbar_core::evaluation::Predictor`], so they evaluate and
//! compare exactly like the baseline.

pub mod artifact;
mod bert;
pub mod encoder;
pub mod error;
pub mod finetune;
pub mod frozen;
pub mod grad;
pub mod head;
pub mod tokenizer;
pub mod toy;
mod vars;

pub use artifact::{NeuralMode, NeuralModel, TrainLog, NEURAL_MODEL_FILE};
pub use encoder::{is_encoder_dir, resolve_encoder_dir, Encoder, ENCODER_ENV};
pub use error::NeuralError;
pub use finetune::{train_finetune, FineTuneConfig};
pub use frozen::{train_frozen, FrozenConfig};
pub use grad::{gru_head_gradient_check, pooled_head_gradient_check, GradCheck};
pub use tokenizer::WordPieceTokenizer;
pub use toy::write_toy_encoder;
