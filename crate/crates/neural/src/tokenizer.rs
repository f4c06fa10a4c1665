//! WordPiece tokenization against a BERT `vocab.txt`.
//!
//! Deliberately minimal: whitespace and punctuation splitting followed by
//! greedy longest-match subword lookup, which is all the published German
//! BERT vocabularies need. Ids are line numbers in the vocabulary file.

use crate::error::NeuralError;
use std::collections::HashMap;
use std::path::Path;
use unicode_normalization::UnicodeNormalization;

pub const PAD_TOKEN: &str = "[PAD]";
pub const UNK_TOKEN: &str = "[UNK]";
pub const CLS_TOKEN: &str = "[CLS]";
pub const SEP_TOKEN: &str = "[SEP]";

/// Words longer than this map straight to `[UNK]` instead of being matched
/// piecewise, mirroring the reference WordPiece implementation.
const MAX_WORD_CHARS: usize = 100;

#[derive(Debug, Clone)]
pub struct WordPieceTokenizer {
    tokens: Vec<String>,
    ids: HashMap<String, u32>,
    lowercase: bool,
    pad_id: u32,
    unk_id: u32,
    cls_id: u32,
    sep_id: u32,
}

/// A batch of sentences padded to the longest row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedBatch {
    /// `(batch, seq)` token ids, `[CLS] … [SEP]` then `[PAD]`.
    pub ids: Vec<Vec<u32>>,
    /// 1 on real tokens, 0 on padding.
    pub attention_mask: Vec<Vec<u32>>,
    /// Valid length per row, specials included. Always at least 2.
    pub lengths: Vec<usize>,
}

impl WordPieceTokenizer {
    pub fn from_vocab_file(path: impl AsRef<Path>, lowercase: bool) -> Result<Self, NeuralError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| NeuralError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_lines(text.lines().map(str::to_string), lowercase)
    }

    pub fn from_lines(
        lines: impl IntoIterator<Item = String>,
        lowercase: bool,
    ) -> Result<Self, NeuralError> {
        let tokens: Vec<String> = lines.into_iter().collect();
        let mut ids = HashMap::with_capacity(tokens.len());
        for (i, token) in tokens.iter().enumerate() {
            if ids.insert(token.clone(), i as u32).is_some() {
                return Err(NeuralError::Vocab(format!("duplicate entry `{token}`")));
            }
        }
        let special = |name: &str| {
            ids.get(name)
                .copied()
                .ok_or_else(|| NeuralError::Vocab(format!("missing special token `{name}`")))
        };
        Ok(WordPieceTokenizer {
            pad_id: special(PAD_TOKEN)?,
            unk_id: special(UNK_TOKEN)?,
            cls_id: special(CLS_TOKEN)?,
            sep_id: special(SEP_TOKEN)?,
            tokens,
            ids,
            lowercase,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.tokens.len()
    }

    pub fn pad_id(&self) -> u32 {
        self.pad_id
    }

    pub fn lowercase(&self) -> bool {
        self.lowercase
    }

    /// Vocabulary in id order, one token per line, for writing `vocab.txt`.
    pub fn vocab_lines(&self) -> String {
        let mut out = self.tokens.join("\n");
        out.push('\n');
        out
    }

    fn basic_tokens(&self, text: &str) -> Vec<String> {
        let normalized: String = text.nfc().collect();
        let mut words = Vec::new();
        let mut current = String::new();
        for ch in normalized.chars() {
            if ch.is_whitespace() {
                if !current.is_empty() {
                    words.push(std::mem::take(&mut current));
                }
            } else if !ch.is_alphanumeric() {
                if !current.is_empty() {
                    words.push(std::mem::take(&mut current));
                }
                words.push(ch.to_string());
            } else if self.lowercase {
                current.extend(ch.to_lowercase());
            } else {
                current.push(ch);
            }
        }
        if !current.is_empty() {
            words.push(current);
        }
        words
    }

    fn wordpiece(&self, word: &str, out: &mut Vec<u32>) {
        let chars: Vec<char> = word.chars().collect();
        if chars.len() > MAX_WORD_CHARS {
            out.push(self.unk_id);
            return;
        }
        let mut pieces = Vec::new();
        let mut start = 0;
        while start < chars.len() {
            let mut end = chars.len();
            let mut found = None;
            while start < end {
                let mut candidate = String::new();
                if start > 0 {
                    candidate.push_str("##");
                }
                candidate.extend(&chars[start..end]);
                if let Some(&id) = self.ids.get(&candidate) {
                    found = Some(id);
                    break;
                }
                end -= 1;
            }
            match found {
                Some(id) => {
                    pieces.push(id);
                    start = end;
                }
                None => {
                    out.push(self.unk_id);
                    return;
                }
            }
        }
        out.extend(pieces);
    }

    /// `[CLS] body [SEP]`, the body truncated to fit `max_seq_len`.
    pub fn encode(&self, text: &str, max_seq_len: usize) -> Vec<u32> {
        let budget = max_seq_len.saturating_sub(2).max(1);
        let mut body = Vec::new();
        for word in self.basic_tokens(text) {
            self.wordpiece(&word, &mut body);
            if body.len() >= budget {
                break;
            }
        }
        body.truncate(budget);
        let mut ids = Vec::with_capacity(body.len() + 2);
        ids.push(self.cls_id);
        ids.extend(body);
        ids.push(self.sep_id);
        ids
    }

    pub fn encode_batch<S: AsRef<str>>(&self, texts: &[S], max_seq_len: usize) -> EncodedBatch {
        let rows: Vec<Vec<u32>> = texts
            .iter()
            .map(|t| self.encode(t.as_ref(), max_seq_len))
            .collect();
        let width = rows.iter().map(Vec::len).max().unwrap_or(0);
        let lengths: Vec<usize> = rows.iter().map(Vec::len).collect();
        let mut ids = Vec::with_capacity(rows.len());
        let mut attention_mask = Vec::with_capacity(rows.len());
        for row in rows {
            let mut mask = vec![1u32; row.len()];
            mask.resize(width, 0);
            let mut padded = row;
            padded.resize(width, self.pad_id);
            ids.push(padded);
            attention_mask.push(mask);
        }
        EncodedBatch {
            ids,
            attention_mask,
            lengths,
        }
    }
}
