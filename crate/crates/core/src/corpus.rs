//! MOS-labeled sentence corpora: loading, validation, splitting and
//! distribution summaries.
//!
//! Corpora live on disk as UTF-8 delimited text (comma-separated, header row,
//! RFC 4180 quoting). Column names are not hard-coded: a [`CorpusSchema`]
//! maps the required and optional columns, so published datasets load without
//! code changes. Sentence text is stored verbatim; any normalization happens
//! downstream in feature extraction.

use crate::histogram::Histogram;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use thiserror::Error;

pub const MOS_MIN: f64 = 1.0;
pub const MOS_MAX: f64 = 7.0;

/// A single German sentence with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    /// Unique within a corpus.
    pub id: String,
    /// Verbatim sentence text.
    pub text: String,
    /// Article or source identifier.
    pub source: String,
    /// Rating-experiment identifier, when the sentence came from one.
    pub experiment_id: Option<String>,
}

/// A sentence plus its aggregated opinion scores on the 1–7 scale.
///
/// Only the complexity score is mandatory; understandability and lexical
/// difficulty are carried when present but are not modeled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSentence {
    pub sentence: Sentence,
    pub mos_complexity: f64,
    pub mos_understandability: Option<f64>,
    pub mos_lexical: Option<f64>,
    pub n_ratings: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitTag {
    Train,
    Test,
    Unsplit,
}

impl fmt::Display for SplitTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitTag::Train => write!(f, "train"),
            SplitTag::Test => write!(f, "test"),
            SplitTag::Unsplit => write!(f, "unsplit"),
        }
    }
}

/// An ordered collection of labeled sentences with unique ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub name: String,
    pub items: Vec<LabeledSentence>,
    pub split_tag: SplitTag,
}

/// Column mapping for the on-disk corpus format.
///
/// Defaults follow the published TextComplexityDE column names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSchema {
    pub id: String,
    pub text: String,
    /// Optional in the file; absent column yields empty sources.
    pub source: String,
    pub experiment_id: String,
    pub mos_complexity: String,
    pub mos_understandability: String,
    pub mos_lexical: String,
    pub n_ratings: String,
    /// Minimum accepted rating count per row (the published test set
    /// guarantees 16).
    pub min_ratings: u32,
}

impl Default for CorpusSchema {
    fn default() -> Self {
        CorpusSchema {
            id: "ID".into(),
            text: "Sentence".into(),
            source: "Article_ID".into(),
            experiment_id: "Experiment_ID".into(),
            mos_complexity: "MOS_Complexity".into(),
            mos_understandability: "MOS_Understandability".into(),
            mos_lexical: "MOS_Lexical_difficulty".into(),
            n_ratings: "Votes_Complexity".into(),
            min_ratings: 1,
        }
    }
}

/// One invalid row, reported with its 1-based data row number.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowError {
    pub row: usize,
    pub id: Option<String>,
    pub message: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.id {
            Some(id) => write!(f, "row {} (id {}): {}", self.row, id, self.message),
            None => write!(f, "row {}: {}", self.row, self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed delimited text in {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("missing required column `{column}` in {path}")]
    MissingColumn { column: String, path: String },
    #[error("{} invalid row(s): {}", .0.len(), format_rows(.0))]
    InvalidRows(Vec<RowError>),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("train_fraction must lie in (0, 1), got {0}")]
    InvalidFraction(f64),
}

fn format_rows(rows: &[RowError]) -> String {
    let shown: Vec<String> = rows.iter().take(5).map(|r| r.to_string()).collect();
    let mut s = shown.join("; ");
    if rows.len() > 5 {
        s.push_str(&format!("; … and {} more", rows.len() - 5));
    }
    s
}

/// A loaded corpus plus non-fatal diagnostics.
#[derive(Debug, Clone)]
pub struct LoadOutcome {
    pub corpus: Corpus,
    pub warnings: Vec<String>,
}

impl Corpus {
    pub fn new(name: impl Into<String>, items: Vec<LabeledSentence>, split_tag: SplitTag) -> Self {
        Corpus {
            name: name.into(),
            items,
            split_tag,
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn sentences(&self) -> Vec<Sentence> {
        self.items.iter().map(|l| l.sentence.clone()).collect()
    }

    pub fn mos_values(&self) -> Vec<f64> {
        self.items.iter().map(|l| l.mos_complexity).collect()
    }

    pub fn get(&self, id: &str) -> Option<&LabeledSentence> {
        self.items.iter().find(|l| l.sentence.id == id)
    }
}

fn validate_item(item: &LabeledSentence, min_ratings: u32) -> Result<(), String> {
    if item.sentence.text.trim().is_empty() {
        return Err("sentence text is empty after trimming".into());
    }
    let check_range = |name: &str, v: f64| -> Result<(), String> {
        if !v.is_finite() || !(MOS_MIN..=MOS_MAX).contains(&v) {
            Err(format!("{name} = {v} outside [{MOS_MIN}, {MOS_MAX}]"))
        } else {
            Ok(())
        }
    };
    check_range("mos_complexity", item.mos_complexity)?;
    if let Some(v) = item.mos_understandability {
        check_range("mos_understandability", v)?;
    }
    if let Some(v) = item.mos_lexical {
        check_range("mos_lexical", v)?;
    }
    if item.n_ratings < min_ratings.max(1) {
        return Err(format!(
            "n_ratings = {} below minimum {}",
            item.n_ratings,
            min_ratings.max(1)
        ));
    }
    Ok(())
}

/// Validate a fully constructed corpus (range, text, id uniqueness).
pub fn validate_corpus(corpus: &Corpus, min_ratings: u32) -> Result<(), CorpusError> {
    let mut errors = Vec::new();
    let mut seen: HashSet<&str> = HashSet::new();
    for (i, item) in corpus.items.iter().enumerate() {
        if let Err(message) = validate_item(item, min_ratings) {
            errors.push(RowError {
                row: i + 1,
                id: Some(item.sentence.id.clone()),
                message,
            });
        }
        if !seen.insert(item.sentence.id.as_str()) {
            errors.push(RowError {
                row: i + 1,
                id: Some(item.sentence.id.clone()),
                message: "duplicate sentence id".into(),
            });
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(CorpusError::InvalidRows(errors))
    }
}

/// Load a corpus from a delimited text file.
///
/// Every invalid row is collected and reported together; a file with any
/// invalid row does not load. An empty file with a valid header loads as an
/// empty corpus with a warning.
pub fn load_corpus(path: impl AsRef<Path>, schema: &CorpusSchema) -> Result<LoadOutcome, CorpusError> {
    let path = path.as_ref();
    let path_str = path.display().to_string();
    // `from_path` can only fail on I/O (open/metadata).
    let mut reader = csv::ReaderBuilder::new()
        .flexible(false)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => CorpusError::Io {
                path: path_str.clone(),
                source: io,
            },
            kind => CorpusError::Io {
                path: path_str.clone(),
                source: std::io::Error::other(format!("{kind:?}")),
            },
        })?;

    let headers = reader
        .headers()
        .map_err(|e| CorpusError::Csv {
            path: path_str.clone(),
            source: e,
        })?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let require = |name: &str| {
        col(name).ok_or_else(|| CorpusError::MissingColumn {
            column: name.to_string(),
            path: path_str.clone(),
        })
    };

    let idx_id = require(&schema.id)?;
    let idx_text = require(&schema.text)?;
    let idx_mos = require(&schema.mos_complexity)?;
    let idx_votes = require(&schema.n_ratings)?;
    let idx_source = col(&schema.source);
    let idx_experiment = col(&schema.experiment_id);
    let idx_under = col(&schema.mos_understandability);
    let idx_lex = col(&schema.mos_lexical);

    let mut items = Vec::new();
    let mut errors = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();

    for (row_no, record) in reader.records().enumerate() {
        let row = row_no + 1;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                errors.push(RowError {
                    row,
                    id: None,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let field = |idx: usize| record.get(idx).unwrap_or("").trim();
        let id = field(idx_id).to_string();
        let mut row_errors = Vec::new();

        if id.is_empty() {
            row_errors.push("empty id".to_string());
        } else if !seen.insert(id.clone()) {
            row_errors.push(format!("duplicate sentence id `{id}`"));
        }

        let parse_mos = |raw: &str, name: &str, errs: &mut Vec<String>| -> Option<f64> {
            if raw.is_empty() {
                return None;
            }
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() && (MOS_MIN..=MOS_MAX).contains(&v) => Some(v),
                Ok(v) => {
                    errs.push(format!("{name} = {v} outside [{MOS_MIN}, {MOS_MAX}]"));
                    None
                }
                Err(_) => {
                    errs.push(format!("{name} `{raw}` is not a number"));
                    None
                }
            }
        };

        let mos_raw = field(idx_mos);
        let mos = if mos_raw.is_empty() {
            row_errors.push(format!("missing {}", schema.mos_complexity));
            None
        } else {
            parse_mos(mos_raw, &schema.mos_complexity, &mut row_errors)
        };

        let under = idx_under
            .and_then(|i| parse_mos(field(i), &schema.mos_understandability, &mut row_errors));
        let lex = idx_lex.and_then(|i| parse_mos(field(i), &schema.mos_lexical, &mut row_errors));

        let votes_raw = field(idx_votes);
        let n_ratings = match votes_raw.parse::<u32>() {
            Ok(n) if n >= schema.min_ratings.max(1) => Some(n),
            Ok(n) => {
                row_errors.push(format!(
                    "n_ratings = {n} below minimum {}",
                    schema.min_ratings.max(1)
                ));
                None
            }
            Err(_) => {
                row_errors.push(format!("n_ratings `{votes_raw}` is not a non-negative integer"));
                None
            }
        };

        let text = field(idx_text).to_string();
        if text.is_empty() {
            row_errors.push("sentence text is empty after trimming".to_string());
        }

        if row_errors.is_empty() {
            items.push(LabeledSentence {
                sentence: Sentence {
                    id,
                    text,
                    source: idx_source.map(|i| field(i).to_string()).unwrap_or_default(),
                    experiment_id: idx_experiment
                        .map(|i| field(i).to_string())
                        .filter(|s| !s.is_empty()),
                },
                mos_complexity: mos.unwrap_or(MOS_MIN),
                mos_understandability: under,
                mos_lexical: lex,
                n_ratings: n_ratings.unwrap_or(1),
            });
        } else {
            errors.push(RowError {
                row,
                id: if id.is_empty() { None } else { Some(id) },
                message: row_errors.join("; "),
            });
        }
    }

    if !errors.is_empty() {
        return Err(CorpusError::InvalidRows(errors));
    }

    let mut warnings = Vec::new();
    if items.is_empty() {
        warnings.push(format!("{path_str}: no data rows, loaded an empty corpus"));
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".to_string());
    Ok(LoadOutcome {
        corpus: Corpus::new(name, items, SplitTag::Unsplit),
        warnings,
    })
}

/// Write a corpus back to delimited text using the same schema.
///
/// Floats are written in shortest round-trip form, so `save` followed by
/// `load` reproduces the corpus exactly.
pub fn save_corpus(
    corpus: &Corpus,
    path: impl AsRef<Path>,
    schema: &CorpusSchema,
) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let path_str = path.display().to_string();
    let mut writer = csv::Writer::from_path(path).map_err(|e| CorpusError::Csv {
        path: path_str.clone(),
        source: e,
    })?;
    writer
        .write_record([
            schema.id.as_str(),
            schema.text.as_str(),
            schema.source.as_str(),
            schema.experiment_id.as_str(),
            schema.mos_complexity.as_str(),
            schema.mos_understandability.as_str(),
            schema.mos_lexical.as_str(),
            schema.n_ratings.as_str(),
        ])
        .and_then(|_| {
            for item in &corpus.items {
                writer.write_record([
                    item.sentence.id.as_str(),
                    item.sentence.text.as_str(),
                    item.sentence.source.as_str(),
                    item.sentence.experiment_id.as_deref().unwrap_or(""),
                    &item.mos_complexity.to_string(),
                    &item
                        .mos_understandability
                        .map(|v| v.to_string())
                        .unwrap_or_default(),
                    &item.mos_lexical.map(|v| v.to_string()).unwrap_or_default(),
                    &item.n_ratings.to_string(),
                ])?;
            }
            writer.flush()?;
            Ok(())
        })
        .map_err(|e| CorpusError::Csv {
            path: path_str,
            source: e,
        })
}

/// Split a corpus into disjoint train/test parts.
///
/// The train side gets `round(train_fraction * n)` items chosen by a seeded
/// shuffle; both parts keep the original corpus order. The same inputs always
/// produce the same split.
pub fn split_corpus(
    corpus: &Corpus,
    train_fraction: f64,
    seed: u64,
) -> Result<(Corpus, Corpus), CorpusError> {
    if corpus.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(CorpusError::InvalidFraction(train_fraction));
    }
    let n = corpus.len();
    let n_train = (train_fraction * n as f64).round() as usize;
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let mut train_idx: Vec<usize> = indices[..n_train].to_vec();
    let mut test_idx: Vec<usize> = indices[n_train..].to_vec();
    train_idx.sort_unstable();
    test_idx.sort_unstable();

    let pick = |idx: &[usize]| -> Vec<LabeledSentence> {
        idx.iter().map(|&i| corpus.items[i].clone()).collect()
    };
    Ok((
        Corpus::new(format!("{}-train", corpus.name), pick(&train_idx), SplitTag::Train),
        Corpus::new(format!("{}-test", corpus.name), pick(&test_idx), SplitTag::Test),
    ))
}

/// Distribution of sentence lengths in characters (Unicode scalar values).
pub fn length_histogram(corpus: &Corpus, bin_width: u32) -> Histogram {
    assert!(bin_width >= 1, "bin_width must be at least 1");
    Histogram::from_values(
        bin_width as f64,
        corpus
            .items
            .iter()
            .map(|l| l.sentence.text.chars().count() as f64),
    )
}

/// Distribution of complexity MOS values.
pub fn mos_histogram(corpus: &Corpus, bin_width: f64) -> Histogram {
    Histogram::from_values(bin_width, corpus.items.iter().map(|l| l.mos_complexity))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn labeled(id: &str, text: &str, mos: f64) -> LabeledSentence {
        LabeledSentence {
            sentence: Sentence {
                id: id.to_string(),
                text: text.to_string(),
                source: "art-1".to_string(),
                experiment_id: None,
            },
            mos_complexity: mos,
            mos_understandability: None,
            mos_lexical: None,
            n_ratings: 5,
        }
    }

    fn small_corpus(n: usize) -> Corpus {
        let items = (0..n)
            .map(|i| labeled(&format!("s{i}"), &format!("Satz Nummer {i}."), 1.0 + (i % 7) as f64 * 0.9))
            .collect();
        Corpus::new("small", items, SplitTag::Unsplit)
    }

    #[test]
    fn split_is_deterministic_and_partitions() {
        let corpus = small_corpus(10);
        let (train_a, test_a) = split_corpus(&corpus, 0.8, 7).unwrap();
        let (train_b, test_b) = split_corpus(&corpus, 0.8, 7).unwrap();
        assert_eq!(train_a, train_b);
        assert_eq!(test_a, test_b);
        assert_eq!(train_a.len(), 8);
        assert_eq!(test_a.len(), 2);
        assert_eq!(train_a.split_tag, SplitTag::Train);
        assert_eq!(test_a.split_tag, SplitTag::Test);

        let mut ids: Vec<&str> = train_a
            .items
            .iter()
            .chain(test_a.items.iter())
            .map(|l| l.sentence.id.as_str())
            .collect();
        ids.sort_unstable();
        let mut expected: Vec<String> = (0..10).map(|i| format!("s{i}")).collect();
        expected.sort();
        assert_eq!(ids, expected.iter().map(|s| s.as_str()).collect::<Vec<_>>());
    }

    #[test]
    fn split_half_of_900_gives_450() {
        let corpus = small_corpus(900);
        let (train, test) = split_corpus(&corpus, 0.5, 0).unwrap();
        assert_eq!(train.len(), 450);
        assert_eq!(test.len(), 450);
    }

    #[test]
    fn split_rejects_bad_fraction() {
        let corpus = small_corpus(4);
        assert!(matches!(
            split_corpus(&corpus, 1.5, 0),
            Err(CorpusError::InvalidFraction(_))
        ));
        assert!(matches!(
            split_corpus(&corpus, 0.0, 0),
            Err(CorpusError::InvalidFraction(_))
        ));
    }

    #[test]
    fn split_rejects_empty_corpus() {
        let corpus = Corpus::new("empty", Vec::new(), SplitTag::Unsplit);
        assert!(matches!(split_corpus(&corpus, 0.5, 0), Err(CorpusError::EmptyCorpus)));
    }

    #[test]
    fn length_histogram_counts_chars() {
        let items = vec![
            labeled("a", &"x".repeat(120), 2.0),
            labeled("b", &"y".repeat(150), 3.0),
            labeled("c", &"z".repeat(410), 4.0),
        ];
        let corpus = Corpus::new("len", items, SplitTag::Unsplit);
        let h = length_histogram(&corpus, 100);
        assert_eq!(h.count(1), 2);
        assert_eq!(h.count(4), 1);
        assert_eq!(h.total, 3);
    }

    #[test]
    fn mos_histogram_conserves_mass() {
        let corpus = small_corpus(37);
        let h = mos_histogram(&corpus, 0.5);
        assert_eq!(h.total, 37);
        assert_eq!(h.bins.values().sum::<u64>(), 37);
    }

    #[test]
    fn validate_rejects_out_of_range_mos() {
        let mut item = labeled("a", "Ein Satz.", 3.0);
        item.mos_complexity = 9.2;
        let corpus = Corpus::new("bad", vec![item], SplitTag::Unsplit);
        let err = validate_corpus(&corpus, 1).unwrap_err();
        match err {
            CorpusError::InvalidRows(rows) => {
                assert_eq!(rows.len(), 1);
                assert!(rows[0].message.contains("mos_complexity"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_duplicate_ids() {
        let corpus = Corpus::new(
            "dup",
            vec![labeled("a", "Eins.", 2.0), labeled("a", "Zwei.", 3.0)],
            SplitTag::Unsplit,
        );
        assert!(matches!(
            validate_corpus(&corpus, 1),
            Err(CorpusError::InvalidRows(_))
        ));
    }
}
