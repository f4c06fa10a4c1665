//! A miniature randomly initialized encoder checkpoint.
//!
//! Written in the standard directory layout so it loads through exactly the
//! same code paths as a published checkpoint, just small enough for tests
//! and demos (2 layers, hidden size 32). The weights are a pure function of
//! the seed; they know nothing about German, but the vocabulary tokenizes
//! any German sentence without `[UNK]` fallout.

use crate::encoder::{CONFIG_FILE, TOKENIZER_CONFIG_FILE, VOCAB_FILE, WEIGHTS_FILE};
use crate::error::NeuralError;
use crate::vars::mix;
use candle_core::{DType, Device, Tensor};
use candle_nn::{VarBuilder, VarMap};
use candle_transformers::models::bert::{BertModel, Config};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::path::Path;

pub const TOY_HIDDEN_SIZE: usize = 32;
pub const TOY_LAYERS: usize = 2;
pub const TOY_MAX_POSITIONS: usize = 64;

const SINGLES: &str = "abcdefghijklmnopqrstuvwxyzäöüß0123456789";
const PUNCT: &[&str] = &[".", ",", "!", "?", "-", ":", ";", "\"", "'", "(", ")"];
const SUFFIX_PIECES: &[&str] = &[
    "##e", "##en", "##er", "##es", "##em", "##n", "##s", "##t", "##te", "##ten", "##ung",
    "##lich", "##ig", "##isch", "##chen", "##heit", "##keit", "##schaft",
];

/// Vocabulary lines: specials, then single characters and their `##`
/// continuations (so every alphanumeric word tokenizes), common suffix
/// pieces, punctuation and the lowercased synthetic word pool.
pub fn toy_vocab() -> Vec<String> {
    let mut lines: Vec<String> = ["[PAD]", "[UNK]", "[CLS]", "[SEP]"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let push = |lines: &mut Vec<String>, entry: String| {
        if !lines.contains(&entry) {
            lines.push(entry);
        }
    };
    for ch in SINGLES.chars() {
        push(&mut lines, ch.to_string());
    }
    for ch in SINGLES.chars() {
        push(&mut lines, format!("##{ch}"));
    }
    for piece in SUFFIX_PIECES {
        push(&mut lines, piece.to_string());
    }
    for punct in PUNCT {
        push(&mut lines, punct.to_string());
    }
    for word in lesbar_core::synthetic::WORD_POOL {
        push(&mut lines, word.to_lowercase());
    }
    lines
}

fn toy_config_json(vocab_size: usize) -> String {
    format!(
        r#"{{
  "architectures": ["BertModel"],
  "attention_probs_dropout_prob": 0.0,
  "hidden_act": "gelu",
  "hidden_dropout_prob": 0.0,
  "hidden_size": {TOY_HIDDEN_SIZE},
  "initializer_range": 0.02,
  "intermediate_size": 64,
  "layer_norm_eps": 1e-12,
  "max_position_embeddings": {TOY_MAX_POSITIONS},
  "model_type": "bert",
  "num_attention_heads": 2,
  "num_hidden_layers": {TOY_LAYERS},
  "pad_token_id": 0,
  "position_embedding_type": "absolute",
  "type_vocab_size": 2,
  "vocab_size": {vocab_size}
}}
"#
    )
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), NeuralError> {
    std::fs::write(path, contents).map_err(|source| NeuralError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Write a complete toy checkpoint into `dir`. Weight values depend only on
/// `seed`, so two writes with the same seed produce equivalent encoders.
pub fn write_toy_encoder(dir: impl AsRef<Path>, seed: u64) -> Result<(), NeuralError> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|source| NeuralError::Io {
        path: dir.to_path_buf(),
        source,
    })?;

    let vocab = toy_vocab();
    write(&dir.join(VOCAB_FILE), vocab.join("\n") + "\n")?;
    let config_json = toy_config_json(vocab.len());
    write(&dir.join(CONFIG_FILE), &config_json)?;
    write(
        &dir.join(TOKENIZER_CONFIG_FILE),
        "{\n  \"do_lower_case\": true\n}\n",
    )?;

    let config: Config = serde_json::from_str(&config_json).map_err(|e| NeuralError::Format {
        path: dir.join(CONFIG_FILE),
        message: e.to_string(),
    })?;
    let device = Device::Cpu;
    let varmap = VarMap::new();
    let vb = VarBuilder::from_varmap(&varmap, DType::F32, &device);
    let _ = BertModel::load(vb, &config)?;

    // The builder initialized every variable from an unseeded source;
    // overwrite them all so the checkpoint is a function of the seed alone.
    {
        let data = varmap.data().lock().unwrap();
        let mut names: Vec<&String> = data.keys().collect();
        names.sort();
        for (i, name) in names.iter().enumerate() {
            let var = &data[*name];
            let dims = var.dims().to_vec();
            let count: usize = dims.iter().product();
            let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, i as u64));
            let layer_norm_weight = name.ends_with("LayerNorm.weight");
            let values: Vec<f32> = (0..count)
                .map(|_| {
                    let g: f64 = rng.sample(StandardNormal);
                    if layer_norm_weight {
                        (1.0 + 0.02 * g) as f32
                    } else if name.ends_with(".bias") {
                        (0.01 * g) as f32
                    } else {
                        (0.05 * g) as f32
                    }
                })
                .collect();
            var.set(&Tensor::from_vec(values, dims, &device)?)?;
        }
    }
    varmap.save(dir.join(WEIGHTS_FILE))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::{is_encoder_dir, Encoder};

    #[test]
    fn writes_a_loadable_checkpoint() {
        let tmp = tempfile::tempdir().unwrap();
        write_toy_encoder(tmp.path(), 11).unwrap();
        assert!(is_encoder_dir(tmp.path()));
        let encoder = Encoder::load_frozen(tmp.path()).unwrap();
        assert_eq!(encoder.hidden_size, TOY_HIDDEN_SIZE);
        assert!(encoder.tokenizer.lowercase());
        let (hidden, lengths) = encoder.embed(&["Der Hund läuft schnell."], 32).unwrap();
        assert_eq!(hidden.dims()[0], 1);
        assert_eq!(hidden.dims()[2], TOY_HIDDEN_SIZE);
        assert_eq!(lengths, vec![hidden.dims()[1]]);
    }

    #[test]
    fn same_seed_means_same_encoder() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        write_toy_encoder(a.path(), 5).unwrap();
        write_toy_encoder(b.path(), 5).unwrap();
        let enc_a = Encoder::load_frozen(a.path()).unwrap();
        let enc_b = Encoder::load_frozen(b.path()).unwrap();
        assert_eq!(enc_a.probe_digest().unwrap(), enc_b.probe_digest().unwrap());
    }

    #[test]
    fn different_seeds_differ() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        write_toy_encoder(a.path(), 5).unwrap();
        write_toy_encoder(b.path(), 6).unwrap();
        let enc_a = Encoder::load_frozen(a.path()).unwrap();
        let enc_b = Encoder::load_frozen(b.path()).unwrap();
        assert_ne!(enc_a.probe_digest().unwrap(), enc_b.probe_digest().unwrap());
    }

    #[test]
    fn vocabulary_covers_german_words_without_unk() {
        let tmp = tempfile::tempdir().unwrap();
        write_toy_encoder(tmp.path(), 1).unwrap();
        let encoder = Encoder::load_frozen(tmp.path()).unwrap();
        let tok = &encoder.tokenizer;
        let unk = 1u32;
        for text in [
            "Die Verantwortung wächst mit jeder Entscheidung.",
            "Größenwahn, Übermut und Faulheit!",
        ] {
            let ids = tok.encode(text, 64);
            assert!(
                !ids.contains(&unk),
                "unexpected [UNK] while encoding {text:?}: {ids:?}"
            );
        }
    }
}
