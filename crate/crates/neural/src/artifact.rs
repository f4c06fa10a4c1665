//! Saved neural scorers.
//!
//! An artifact directory always carries its own tokenizer state (`vocab.txt`
//! plus config copies), the head weights, a manifest and `neural.json`. A
//! fine-tuned artifact embeds the adapted encoder outright and is itself a
//! valid encoder checkpoint; a frozen artifact references the shared
//! pretrained checkpoint and pins it by digest.

use crate::encoder::{
    is_encoder_dir, resolve_encoder_dir, Encoder, CONFIG_FILE, ENCODER_ENV,
    TOKENIZER_CONFIG_FILE, VOCAB_FILE, WEIGHTS_FILE,
};
use crate::error::NeuralError;
use crate::finetune::FineTuneConfig;
use crate::frozen::FrozenConfig;
use crate::head::{gru_head, pooled_head, GruHead, PooledHead};
use crate::tokenizer::WordPieceTokenizer;
use candle_core::DType;
use candle_nn::{VarBuilder, VarMap};
use lesbar_core::corpus::Sentence;
use lesbar_core::evaluation::{PredictionFailure, Predictor};
use lesbar_core::provenance::{self, Provenance};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const NEURAL_MODEL_FILE: &str = "neural.json";
pub const HEAD_WEIGHTS_FILE: &str = "head.safetensors";
pub const NEURAL_SCHEMA_VERSION: u32 = 1;

const PREDICT_BATCH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeuralMode {
    Frozen,
    FineTuned,
}

/// Per-epoch mean MSE, plus which epoch's weights the model kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub train_loss: Vec<f64>,
    /// Empty when training ran without a validation split.
    pub validation_loss: Vec<f64>,
    pub best_epoch: usize,
}

pub(crate) enum HeadKind {
    Gru(GruHead),
    Pooled(PooledHead),
}

pub struct NeuralModel {
    pub(crate) mode: NeuralMode,
    pub(crate) encoder: Encoder,
    pub(crate) head: HeadKind,
    pub(crate) head_vars: VarMap,
    /// Present right after fine-tuning; loaded models keep the encoder as
    /// constants instead.
    pub(crate) encoder_vars: Option<VarMap>,
    pub(crate) frozen_config: Option<FrozenConfig>,
    pub(crate) fine_tune_config: Option<FineTuneConfig>,
    pub(crate) max_seq_len: usize,
    pub(crate) train_log: TrainLog,
}

#[derive(Serialize, Deserialize)]
struct NeuralModelFile {
    schema_version: u32,
    mode: NeuralMode,
    hidden_size: usize,
    max_positions: usize,
    max_seq_len: usize,
    lowercase: bool,
    frozen: Option<FrozenConfig>,
    fine_tuned: Option<FineTuneConfig>,
    /// Frozen mode only: the referenced encoder checkpoint.
    encoder_dir: Option<PathBuf>,
    /// Digest of the weights file prediction depends on: the referenced
    /// checkpoint when frozen, the embedded one when fine-tuned.
    encoder_digest: String,
    train_log: TrainLog,
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), NeuralError> {
    std::fs::write(path, contents).map_err(|source| NeuralError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn format_err(path: &Path, message: impl Into<String>) -> NeuralError {
    NeuralError::Format {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

impl std::fmt::Debug for NeuralModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NeuralModel")
            .field("mode", &self.mode)
            .field("encoder", &self.encoder)
            .field("max_seq_len", &self.max_seq_len)
            .finish_non_exhaustive()
    }
}

impl NeuralModel {
    pub fn mode(&self) -> NeuralMode {
        self.mode
    }

    pub fn train_log(&self) -> &TrainLog {
        &self.train_log
    }

    pub fn max_seq_len(&self) -> usize {
        self.max_seq_len
    }

    pub fn hidden_size(&self) -> usize {
        self.encoder.hidden_size
    }

    /// Digest of the weights file this model depends on.
    pub fn encoder_digest(&self) -> &str {
        &self.encoder.weights_digest
    }

    /// Digest of the encoder's states on a fixed probe input; see
    /// [`Encoder::probe_digest`].
    pub fn encoder_probe_digest(&self) -> Result<String, NeuralError> {
        self.encoder.probe_digest()
    }

    fn predict_chunk(&self, texts: &[&str]) -> Result<Vec<f64>, NeuralError> {
        let batch = self.encoder.tokenizer.encode_batch(texts, self.max_seq_len);
        let hidden = self.encoder.forward_ids(&batch.ids, &batch.attention_mask)?;
        let scores = match &self.head {
            HeadKind::Gru(head) => head.forward(&hidden, &batch.lengths, false)?,
            HeadKind::Pooled(head) => {
                let cls = hidden.narrow(1, 0, 1)?.squeeze(1)?;
                head.forward(&cls, false)?
            }
        };
        Ok(scores
            .to_vec1::<f32>()?
            .into_iter()
            .map(f64::from)
            .collect())
    }

    pub fn predict_scores(&self, sentences: &[Sentence]) -> Result<Vec<f64>, NeuralError> {
        let mut out = Vec::with_capacity(sentences.len());
        for chunk in sentences.chunks(PREDICT_BATCH) {
            let texts: Vec<&str> = chunk.iter().map(|s| s.text.as_str()).collect();
            out.extend(self.predict_chunk(&texts)?);
        }
        Ok(out)
    }

    /// Write the artifact into `dir` along with its provenance manifest.
    pub fn save(&self, dir: impl AsRef<Path>, manifest: &Provenance) -> Result<(), NeuralError> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|source| NeuralError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        write_file(&dir.join(VOCAB_FILE), self.encoder.tokenizer.vocab_lines())?;
        write_file(&dir.join(CONFIG_FILE), &self.encoder.config_json)?;
        write_file(
            &dir.join(TOKENIZER_CONFIG_FILE),
            format!(
                "{{\n  \"do_lower_case\": {}\n}}\n",
                self.encoder.tokenizer.lowercase()
            ),
        )?;
        self.head_vars.save(dir.join(HEAD_WEIGHTS_FILE))?;

        let encoder_digest = match self.mode {
            NeuralMode::Frozen => self.encoder.weights_digest.clone(),
            NeuralMode::FineTuned => {
                let weights = dir.join(WEIGHTS_FILE);
                match &self.encoder_vars {
                    Some(vars) => vars.save(&weights)?,
                    None => {
                        let source = self.encoder.dir.join(WEIGHTS_FILE);
                        std::fs::copy(&source, &weights).map_err(|e| NeuralError::Io {
                            path: source,
                            source: e,
                        })?;
                    }
                }
                provenance::hash_file(&weights)?
            }
        };

        let file = NeuralModelFile {
            schema_version: NEURAL_SCHEMA_VERSION,
            mode: self.mode,
            hidden_size: self.encoder.hidden_size,
            max_positions: self.encoder.max_positions,
            max_seq_len: self.max_seq_len,
            lowercase: self.encoder.tokenizer.lowercase(),
            frozen: self.frozen_config.clone(),
            fine_tuned: self.fine_tune_config.clone(),
            encoder_dir: match self.mode {
                NeuralMode::Frozen => Some(self.encoder.dir.clone()),
                NeuralMode::FineTuned => None,
            },
            encoder_digest,
            train_log: self.train_log.clone(),
        };
        let path = dir.join(NEURAL_MODEL_FILE);
        let mut json =
            serde_json::to_vec_pretty(&file).map_err(|e| format_err(&path, e.to_string()))?;
        json.push(b'\n');
        write_file(&path, json)?;

        provenance::write_manifest(dir, manifest)?;
        Ok(())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<NeuralModel, NeuralError> {
        let dir = dir.as_ref();
        let path = dir.join(NEURAL_MODEL_FILE);
        let bytes = std::fs::read(&path).map_err(|source| NeuralError::Io {
            path: path.clone(),
            source,
        })?;
        let file: NeuralModelFile =
            serde_json::from_slice(&bytes).map_err(|e| format_err(&path, e.to_string()))?;
        if file.schema_version != NEURAL_SCHEMA_VERSION {
            return Err(format_err(
                &path,
                format!(
                    "schema version {} unsupported (expected {NEURAL_SCHEMA_VERSION})",
                    file.schema_version
                ),
            ));
        }
        let tokenizer =
            WordPieceTokenizer::from_vocab_file(dir.join(VOCAB_FILE), file.lowercase)?;

        let (mut encoder, head, head_vars) = match file.mode {
            NeuralMode::Frozen => {
                let config = file
                    .frozen
                    .as_ref()
                    .ok_or_else(|| format_err(&path, "frozen model without a frozen config"))?;
                let stored = file
                    .encoder_dir
                    .clone()
                    .ok_or_else(|| format_err(&path, "frozen model without an encoder_dir"))?;
                let source = [Some(stored.clone()), resolve_encoder_dir(None)]
                    .into_iter()
                    .flatten()
                    .find(|dir| is_encoder_dir(dir))
                    .ok_or_else(|| {
                        NeuralError::EncoderUnavailable(format!(
                            "model references {} which is not a checkpoint; set {ENCODER_ENV} \
                             to relocate it",
                            stored.display()
                        ))
                    })?;
                let encoder = Encoder::load_frozen(&source)?;
                if encoder.weights_digest != file.encoder_digest {
                    return Err(NeuralError::EncoderMismatch {
                        path: source.join(WEIGHTS_FILE),
                        expected: file.encoder_digest.clone(),
                        found: encoder.weights_digest.clone(),
                    });
                }
                let mut head_vars = VarMap::new();
                let vb =
                    VarBuilder::from_varmap(&head_vars, DType::F32, encoder.device());
                let head = gru_head(
                    vb,
                    file.hidden_size,
                    config.gru_hidden,
                    config.gru_layers,
                    config.dropout as f32,
                )?;
                head_vars.load(dir.join(HEAD_WEIGHTS_FILE))?;
                (encoder, HeadKind::Gru(head), head_vars)
            }
            NeuralMode::FineTuned => {
                let config = file.fine_tuned.as_ref().ok_or_else(|| {
                    format_err(&path, "fine-tuned model without a fine_tuned config")
                })?;
                let encoder = Encoder::load_frozen(dir)?;
                if encoder.weights_digest != file.encoder_digest {
                    return Err(NeuralError::EncoderMismatch {
                        path: dir.join(WEIGHTS_FILE),
                        expected: file.encoder_digest.clone(),
                        found: encoder.weights_digest.clone(),
                    });
                }
                let mut head_vars = VarMap::new();
                let vb =
                    VarBuilder::from_varmap(&head_vars, DType::F32, encoder.device());
                let head = pooled_head(vb, file.hidden_size, config.dropout as f32)?;
                head_vars.load(dir.join(HEAD_WEIGHTS_FILE))?;
                (encoder, HeadKind::Pooled(head), head_vars)
            }
        };
        if encoder.hidden_size != file.hidden_size {
            return Err(format_err(
                &path,
                format!(
                    "encoder hidden size {} does not match the model's {}",
                    encoder.hidden_size, file.hidden_size
                ),
            ));
        }
        if tokenizer.vocab_size() > encoder.model_vocab_size() {
            return Err(format_err(
                &path,
                format!(
                    "vocabulary has {} entries but the encoder embeds {}",
                    tokenizer.vocab_size(),
                    encoder.model_vocab_size()
                ),
            ));
        }
        encoder.tokenizer = tokenizer;

        Ok(NeuralModel {
            mode: file.mode,
            max_seq_len: file.max_seq_len.min(encoder.max_positions),
            encoder,
            head,
            head_vars,
            encoder_vars: None,
            frozen_config: file.frozen,
            fine_tune_config: file.fine_tuned,
            train_log: file.train_log,
        })
    }
}

impl Predictor for NeuralModel {
    fn model_id(&self) -> String {
        match self.mode {
            NeuralMode::Frozen => "bert-frozen-gru".to_string(),
            NeuralMode::FineTuned => "bert-fine-tuned".to_string(),
        }
    }

    fn predict(&self, sentences: &[Sentence]) -> Result<Vec<f64>, PredictionFailure> {
        self.predict_scores(sentences).map_err(|e| PredictionFailure {
            sentence_id: None,
            message: e.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finetune::{train_finetune, FineTuneConfig};
    use crate::frozen::{train_frozen, FrozenConfig};
    use crate::toy::write_toy_encoder;
    use lesbar_core::corpus::{Corpus, LabeledSentence, SplitTag};
    use lesbar_core::provenance::read_manifest;

    fn corpus() -> Corpus {
        let texts = [
            "Der Hund läuft schnell.",
            "Die Katze bleibt heute ruhig im Garten.",
            "Die Wissenschaft findet manchmal sehr wichtige Antworten.",
            "Ein Kind spielt dort.",
            "Die Entwicklung der Stadt bleibt eine große Verantwortung.",
            "Der Baum ist alt.",
        ];
        let items = texts
            .iter()
            .enumerate()
            .map(|(i, text)| LabeledSentence {
                sentence: Sentence {
                    id: format!("s-{i}"),
                    text: text.to_string(),
                    source: "t".into(),
                    experiment_id: None,
                },
                mos_complexity: 1.5 + 0.9 * i as f64,
                mos_understandability: None,
                mos_lexical: None,
                n_ratings: 16,
            })
            .collect();
        Corpus::new("tiny", items, SplitTag::Train)
    }

    fn quick_frozen() -> FrozenConfig {
        FrozenConfig {
            gru_hidden: 8,
            gru_layers: 1,
            dropout: 0.0,
            learning_rate: 5e-3,
            batch_size: 8,
            epochs: 2,
            max_seq_len: 24,
            validation_fraction: 0.0,
            seed: 5,
        }
    }

    fn quick_finetune() -> FineTuneConfig {
        FineTuneConfig {
            learning_rate: 1e-3,
            batch_size: 8,
            epochs: 1,
            dropout: 0.0,
            max_seq_len: 24,
            seed: 5,
        }
    }

    fn manifest() -> Provenance {
        Provenance::new("train").with_seed(5)
    }

    #[test]
    fn frozen_artifact_round_trips_bitwise() {
        let enc = tempfile::tempdir().unwrap();
        write_toy_encoder(enc.path(), 21).unwrap();
        let corpus = corpus();
        let model = train_frozen(enc.path(), &corpus, &quick_frozen()).unwrap();
        let sentences: Vec<Sentence> =
            corpus.items.iter().map(|l| l.sentence.clone()).collect();
        let before = model.predict_scores(&sentences).unwrap();

        let out = tempfile::tempdir().unwrap();
        model.save(out.path(), &manifest()).unwrap();
        let loaded = NeuralModel::load(out.path()).unwrap();
        let after = loaded.predict_scores(&sentences).unwrap();
        assert_eq!(before, after);
        assert_eq!(loaded.mode(), NeuralMode::Frozen);
        assert_eq!(loaded.model_id(), "bert-frozen-gru");
        assert_eq!(loaded.train_log(), model.train_log());
        assert_eq!(read_manifest(out.path()).unwrap().stage, "train");
    }

    #[test]
    fn fine_tuned_artifact_is_self_contained() {
        let enc = tempfile::tempdir().unwrap();
        write_toy_encoder(enc.path(), 22).unwrap();
        let corpus = corpus();
        let model = train_finetune(enc.path(), &corpus, &quick_finetune()).unwrap();
        let sentences: Vec<Sentence> =
            corpus.items.iter().map(|l| l.sentence.clone()).collect();
        let before = model.predict_scores(&sentences).unwrap();

        let out = tempfile::tempdir().unwrap();
        model.save(out.path(), &manifest()).unwrap();
        // The embedded encoder makes the artifact independent of the
        // original checkpoint, and a checkpoint in its own right.
        std::fs::remove_dir_all(enc.path()).unwrap();
        assert!(is_encoder_dir(out.path()));
        let loaded = NeuralModel::load(out.path()).unwrap();
        assert_eq!(loaded.predict_scores(&sentences).unwrap(), before);
        assert_eq!(loaded.model_id(), "bert-fine-tuned");
    }

    #[test]
    fn frozen_load_rejects_swapped_encoder() {
        let enc = tempfile::tempdir().unwrap();
        write_toy_encoder(enc.path(), 23).unwrap();
        let corpus = corpus();
        let model = train_frozen(enc.path(), &corpus, &quick_frozen()).unwrap();
        let out = tempfile::tempdir().unwrap();
        model.save(out.path(), &manifest()).unwrap();

        write_toy_encoder(enc.path(), 24).unwrap();
        let err = NeuralModel::load(out.path()).unwrap_err();
        assert!(matches!(err, NeuralError::EncoderMismatch { .. }), "{err}");
    }

    #[test]
    fn load_requires_tokenizer_state() {
        let enc = tempfile::tempdir().unwrap();
        write_toy_encoder(enc.path(), 25).unwrap();
        let model = train_frozen(enc.path(), &corpus(), &quick_frozen()).unwrap();
        let out = tempfile::tempdir().unwrap();
        model.save(out.path(), &manifest()).unwrap();

        std::fs::remove_file(out.path().join(VOCAB_FILE)).unwrap();
        let err = NeuralModel::load(out.path()).unwrap_err();
        assert!(err.to_string().contains(VOCAB_FILE), "{err}");
    }

    #[test]
    fn load_rejects_future_schema() {
        let enc = tempfile::tempdir().unwrap();
        write_toy_encoder(enc.path(), 26).unwrap();
        let model = train_frozen(enc.path(), &corpus(), &quick_frozen()).unwrap();
        let out = tempfile::tempdir().unwrap();
        model.save(out.path(), &manifest()).unwrap();

        let path = out.path().join(NEURAL_MODEL_FILE);
        let json = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, json.replace("\"schema_version\": 1", "\"schema_version\": 99"))
            .unwrap();
        let err = NeuralModel::load(out.path()).unwrap_err();
        assert!(err.to_string().contains("schema version"), "{err}");
    }

    #[test]
    fn predicts_nothing_for_no_sentences() {
        let enc = tempfile::tempdir().unwrap();
        write_toy_encoder(enc.path(), 27).unwrap();
        let model = train_frozen(enc.path(), &corpus(), &quick_frozen()).unwrap();
        assert_eq!(model.predict_scores(&[]).unwrap(), Vec::<f64>::new());
    }

    #[test]
    fn works_through_the_predictor_trait() {
        let enc = tempfile::tempdir().unwrap();
        write_toy_encoder(enc.path(), 28).unwrap();
        let corpus = corpus();
        let model = train_frozen(enc.path(), &corpus, &quick_frozen()).unwrap();
        let report = lesbar_core::evaluation::evaluate(&model, &corpus, 0.25).unwrap();
        assert_eq!(report.model_id, "bert-frozen-gru");
        assert_eq!(report.n, corpus.items.len());
        assert!(report.rmse.is_finite());
    }
}
