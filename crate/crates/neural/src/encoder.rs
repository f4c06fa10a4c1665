//! Loading BERT encoder checkpoints.
//!
//! A checkpoint is a directory in the standard published layout:
//! `config.json`, `vocab.txt` and `model.safetensors`, with an optional
//! `tokenizer_config.json` carrying the casing flag. Weight names may be
//! bare or under the `bert.` prefix; both forms load.

use crate::error::NeuralError;
use crate::tokenizer::WordPieceTokenizer;
use candle_core::safetensors::MmapedSafetensors;
use candle_core::{DType, Device, Tensor};
use candle_nn::{VarBuilder, VarMap};
use candle_transformers::models::bert::{BertModel, Config};
use lesbar_core::provenance;
use serde::Deserialize;
use std::path::{Path, PathBuf};

pub const ENCODER_ENV: &str = "LESBAR_ENCODER";
pub const CONFIG_FILE: &str = "config.json";
pub const VOCAB_FILE: &str = "vocab.txt";
pub const WEIGHTS_FILE: &str = "model.safetensors";
pub const TOKENIZER_CONFIG_FILE: &str = "tokenizer_config.json";

/// The three files every loadable checkpoint must contain.
pub const REQUIRED_FILES: [&str; 3] = [CONFIG_FILE, VOCAB_FILE, WEIGHTS_FILE];

#[derive(Debug, Default, Deserialize)]
struct TokenizerOptions {
    #[serde(default)]
    do_lower_case: bool,
}

/// Where to look for an encoder checkpoint: an explicit path wins, then the
/// `LESBAR_ENCODER` environment variable. `None` when neither is set.
pub fn resolve_encoder_dir(explicit: Option<&Path>) -> Option<PathBuf> {
    if let Some(path) = explicit {
        return Some(path.to_path_buf());
    }
    match std::env::var(ENCODER_ENV) {
        Ok(value) if !value.trim().is_empty() => Some(PathBuf::from(value)),
        _ => None,
    }
}

/// True when `dir` holds a complete checkpoint.
pub fn is_encoder_dir(dir: impl AsRef<Path>) -> bool {
    let dir = dir.as_ref();
    REQUIRED_FILES.iter().all(|file| dir.join(file).is_file())
}

fn require_files(dir: &Path) -> Result<(), NeuralError> {
    for file in REQUIRED_FILES {
        if !dir.join(file).is_file() {
            return Err(NeuralError::MissingEncoderFile {
                dir: dir.to_path_buf(),
                file,
            });
        }
    }
    Ok(())
}

fn read_to_string(path: &Path) -> Result<String, NeuralError> {
    std::fs::read_to_string(path).map_err(|source| NeuralError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_config(path: &Path, json: &str) -> Result<Config, NeuralError> {
    serde_json::from_str(json).map_err(|e| NeuralError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn read_lowercase_flag(dir: &Path) -> Result<bool, NeuralError> {
    let path = dir.join(TOKENIZER_CONFIG_FILE);
    if !path.is_file() {
        return Ok(false);
    }
    let json = read_to_string(&path)?;
    let options: TokenizerOptions = serde_json::from_str(&json).map_err(|e| NeuralError::Format {
        path,
        message: e.to_string(),
    })?;
    Ok(options.do_lower_case)
}

/// Weight-name prefix used by the checkpoint, detected from the tensor
/// names: published BERT exports usually carry `bert.`, our own saves do not.
pub(crate) fn weights_prefix(path: &Path) -> Result<Option<&'static str>, NeuralError> {
    let tensors = unsafe { MmapedSafetensors::new(path)? };
    let has_bert = tensors
        .tensors()
        .iter()
        .any(|(name, _)| name.starts_with("bert."));
    Ok(has_bert.then_some("bert"))
}

pub(crate) fn build_bert(vb: VarBuilder, prefix: Option<&str>, config: &Config) -> Result<BertModel, NeuralError> {
    let vb = match prefix {
        Some(p) => vb.pp(p),
        None => vb,
    };
    Ok(BertModel::load(vb, config)?)
}

/// A loaded encoder plus its tokenizer and identifying digest.
pub struct Encoder {
    pub model: BertModel,
    pub tokenizer: WordPieceTokenizer,
    /// sha256 of `model.safetensors`.
    pub weights_digest: String,
    /// Verbatim `config.json`, kept for copying into artifacts.
    pub config_json: String,
    pub hidden_size: usize,
    pub max_positions: usize,
    pub dir: PathBuf,
    pub(crate) config: Config,
    /// Weight-name prefix the checkpoint uses, if any.
    pub(crate) prefix: Option<&'static str>,
    vocab_size: usize,
    device: Device,
}

fn check_vocab_fits(
    dir: &Path,
    tokenizer: &WordPieceTokenizer,
    config: &Config,
) -> Result<(), NeuralError> {
    if tokenizer.vocab_size() > config.vocab_size {
        return Err(NeuralError::Format {
            path: dir.join(VOCAB_FILE),
            message: format!(
                "{} vocabulary entries exceed the {}-row embedding table",
                tokenizer.vocab_size(),
                config.vocab_size
            ),
        });
    }
    Ok(())
}

impl std::fmt::Debug for Encoder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Encoder")
            .field("dir", &self.dir)
            .field("hidden_size", &self.hidden_size)
            .field("weights_digest", &self.weights_digest)
            .finish_non_exhaustive()
    }
}

impl Encoder {
    /// Load with memory-mapped constant weights. Nothing in the result is
    /// trainable, so the encoder is frozen by construction.
    pub fn load_frozen(dir: impl AsRef<Path>) -> Result<Encoder, NeuralError> {
        let dir = dir.as_ref();
        require_files(dir)?;
        let device = Device::Cpu;
        let config_path = dir.join(CONFIG_FILE);
        let config_json = read_to_string(&config_path)?;
        let config = parse_config(&config_path, &config_json)?;
        let tokenizer =
            WordPieceTokenizer::from_vocab_file(dir.join(VOCAB_FILE), read_lowercase_flag(dir)?)?;
        check_vocab_fits(dir, &tokenizer, &config)?;
        let weights = dir.join(WEIGHTS_FILE);
        let weights_digest = provenance::hash_file(&weights)?;
        let prefix = weights_prefix(&weights)?;
        let vb =
            unsafe { VarBuilder::from_mmaped_safetensors(&[&weights], DType::F32, &device)? };
        let model = build_bert(vb, prefix, &config)?;
        Ok(Encoder {
            model,
            tokenizer,
            weights_digest,
            config_json,
            hidden_size: config.hidden_size,
            max_positions: config.max_position_embeddings,
            dir: dir.to_path_buf(),
            vocab_size: config.vocab_size,
            config,
            prefix,
            device,
        })
    }

    /// Load into `varmap` so every weight is a trainable variable. The map
    /// must be empty on entry; pretrained values are read over the random
    /// initialization.
    pub fn load_trainable(
        dir: impl AsRef<Path>,
        varmap: &mut VarMap,
    ) -> Result<Encoder, NeuralError> {
        let dir = dir.as_ref();
        require_files(dir)?;
        let device = Device::Cpu;
        let config_path = dir.join(CONFIG_FILE);
        let config_json = read_to_string(&config_path)?;
        let config = parse_config(&config_path, &config_json)?;
        let tokenizer =
            WordPieceTokenizer::from_vocab_file(dir.join(VOCAB_FILE), read_lowercase_flag(dir)?)?;
        check_vocab_fits(dir, &tokenizer, &config)?;
        let weights = dir.join(WEIGHTS_FILE);
        let weights_digest = provenance::hash_file(&weights)?;
        let prefix = weights_prefix(&weights)?;
        let vb = VarBuilder::from_varmap(varmap, DType::F32, &device);
        let model = build_bert(vb, prefix, &config)?;
        varmap.load(&weights)?;
        Ok(Encoder {
            model,
            tokenizer,
            weights_digest,
            config_json,
            hidden_size: config.hidden_size,
            max_positions: config.max_position_embeddings,
            dir: dir.to_path_buf(),
            vocab_size: config.vocab_size,
            config,
            prefix,
            device,
        })
    }

    pub fn device(&self) -> &Device {
        &self.device
    }

    /// Vocabulary capacity of the embedding table.
    pub fn model_vocab_size(&self) -> usize {
        self.vocab_size
    }

    /// Sequence length cap honoring the position-embedding table.
    pub fn clamp_seq_len(&self, requested: usize) -> usize {
        requested.min(self.max_positions)
    }

    /// Encoded ids and mask as `(ids, token_types, mask)` tensors.
    pub(crate) fn batch_tensors(
        &self,
        ids: &[Vec<u32>],
        attention_mask: &[Vec<u32>],
    ) -> Result<(Tensor, Tensor, Tensor), NeuralError> {
        let batch = ids.len();
        if batch == 0 {
            return Err(NeuralError::Train("empty batch".into()));
        }
        let seq = ids[0].len();
        let flat_ids: Vec<u32> = ids.iter().flatten().copied().collect();
        let flat_mask: Vec<u32> = attention_mask.iter().flatten().copied().collect();
        let ids = Tensor::from_vec(flat_ids, (batch, seq), &self.device)?;
        let mask = Tensor::from_vec(flat_mask, (batch, seq), &self.device)?;
        let token_types = ids.zeros_like()?;
        Ok((ids, token_types, mask))
    }

    /// Hidden states `(batch, seq, hidden)` for already-encoded ids.
    pub fn forward_ids(
        &self,
        ids: &[Vec<u32>],
        attention_mask: &[Vec<u32>],
    ) -> Result<Tensor, NeuralError> {
        let (ids, token_types, mask) = self.batch_tensors(ids, attention_mask)?;
        Ok(self.model.forward(&ids, &token_types, Some(&mask))?)
    }

    /// Tokenize and embed a batch of texts; also returns the valid lengths.
    pub fn embed<S: AsRef<str>>(
        &self,
        texts: &[S],
        max_seq_len: usize,
    ) -> Result<(Tensor, Vec<usize>), NeuralError> {
        let batch = self
            .tokenizer
            .encode_batch(texts, self.clamp_seq_len(max_seq_len));
        let hidden = self.forward_ids(&batch.ids, &batch.attention_mask)?;
        Ok((hidden, batch.lengths))
    }

    /// Digest of the hidden states for a fixed probe input; bitwise-stable
    /// for a frozen encoder, so a changed digest means the weights moved.
    pub fn probe_digest(&self) -> Result<String, NeuralError> {
        let probe = [
            "Die Länge dieses Satzes ist bewusst gewählt.",
            "Kurz.",
        ];
        let (hidden, _) = self.embed(&probe, 16)?;
        let values = hidden.flatten_all()?.to_vec1::<f32>()?;
        let mut bytes = Vec::with_capacity(values.len() * 4);
        for v in values {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        Ok(provenance::sha256_hex(&bytes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolve_prefers_explicit_path() {
        let dir = resolve_encoder_dir(Some(Path::new("/tmp/enc")));
        assert_eq!(dir, Some(PathBuf::from("/tmp/enc")));
    }

    #[test]
    fn missing_file_is_reported_by_name() {
        let tmp = tempfile::tempdir().unwrap();
        std::fs::write(tmp.path().join(CONFIG_FILE), "{}").unwrap();
        let err = Encoder::load_frozen(tmp.path()).unwrap_err();
        assert!(err.to_string().contains(VOCAB_FILE));
        assert!(!is_encoder_dir(tmp.path()));
    }
}
