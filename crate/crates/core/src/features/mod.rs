//! Linguistic feature extraction and the three-stage selection pipeline.
//!
//! [`catalog`] defines the 73 default extractors, [`resources`] the optional
//! frequency list and tagger, [`selection`] the missing-value filter,
//! correlation filter and recursive feature elimination.

pub mod catalog;
pub mod resources;
pub mod selection;
pub mod tagger;
pub mod text;

pub use catalog::{default_catalog, CatalogEntry, FeatureCatalog, FeatureGroup, ResourceNeed};
pub use resources::{FrequencyList, ResourceConfig, ResourceSetting, Resources};
pub use selection::{
    select_features, SelectionConfig, SelectionError, SelectionOutcome, SelectionReport,
};

use crate::corpus::{Corpus, Sentence};
use crate::exec::{self, ExecMode};
use catalog::SentenceStats;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

/// One sentence's feature values. `None` is the MISSING marker; it is kept
/// distinct from every real number through the whole pipeline and encoded
/// as an empty cell on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub sentence_id: String,
    pub values: BTreeMap<String, Option<f64>>,
}

impl FeatureVector {
    pub fn get(&self, name: &str) -> Option<Option<f64>> {
        self.values.get(name).copied()
    }
}

/// Row-major feature matrix; every row's key set equals `feature_names`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    /// Catalog order; the correlation filter's tie-break depends on it.
    pub feature_names: Vec<String>,
    pub rows: Vec<FeatureVector>,
}

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed feature file {path}: {message}")]
    Format { path: String, message: String },
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("row `{sentence_id}` does not match the matrix feature names")]
    InconsistentRow { sentence_id: String },
    #[error("feature `{feature}` has a MISSING value in row `{sentence_id}`")]
    MissingValue { feature: String, sentence_id: String },
}

/// Extract one sentence against a catalog. Never fails: unavailable
/// resources and empty denominators yield MISSING values.
pub fn extract_features(
    sentence: &Sentence,
    catalog: &FeatureCatalog,
    resources: &Resources,
) -> FeatureVector {
    let stats = SentenceStats::compute(&sentence.text, resources);
    let values = catalog
        .names()
        .into_iter()
        .zip(catalog.extract_stats(&stats))
        .collect();
    FeatureVector {
        sentence_id: sentence.id.clone(),
        values,
    }
}

/// Row-wise extraction over a corpus, parallel across rows under
/// [`ExecMode::Parallel`]. Row order follows the corpus.
pub fn extract_matrix(
    corpus: &Corpus,
    catalog: &FeatureCatalog,
    resources: &Resources,
    mode: ExecMode,
) -> FeatureMatrix {
    let rows = exec::map_slice(mode, &corpus.items, |item| {
        extract_features(&item.sentence, catalog, resources)
    });
    FeatureMatrix {
        feature_names: catalog.names(),
        rows,
    }
}

/// Fully dense (no MISSING) column-major matrix for model training.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub names: Vec<String>,
    /// One Vec per feature, each of length `n_rows`.
    pub columns: Vec<Vec<f64>>,
    pub n_rows: usize,
}

impl DenseMatrix {
    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    pub fn drop_column(&mut self, at: usize) {
        self.names.remove(at);
        self.columns.remove(at);
    }
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn validate(&self) -> Result<(), FeatureError> {
        for row in &self.rows {
            if row.values.len() != self.feature_names.len()
                || !self.feature_names.iter().all(|n| row.values.contains_key(n))
            {
                return Err(FeatureError::InconsistentRow {
                    sentence_id: row.sentence_id.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn column(&self, name: &str) -> Result<Vec<Option<f64>>, FeatureError> {
        if !self.feature_names.iter().any(|n| n == name) {
            return Err(FeatureError::UnknownFeature(name.to_string()));
        }
        Ok(self
            .rows
            .iter()
            .map(|r| r.values.get(name).copied().flatten())
            .collect())
    }

    /// Restrict to `names`, keeping this matrix's column order.
    pub fn select_columns(&self, names: &[String]) -> Result<FeatureMatrix, FeatureError> {
        for name in names {
            if !self.feature_names.iter().any(|n| n == name) {
                return Err(FeatureError::UnknownFeature(name.clone()));
            }
        }
        let kept: Vec<String> = self
            .feature_names
            .iter()
            .filter(|n| names.contains(n))
            .cloned()
            .collect();
        let rows = self
            .rows
            .iter()
            .map(|r| FeatureVector {
                sentence_id: r.sentence_id.clone(),
                values: r
                    .values
                    .iter()
                    .filter(|(k, _)| kept.contains(k))
                    .map(|(k, v)| (k.clone(), *v))
                    .collect(),
            })
            .collect();
        Ok(FeatureMatrix {
            feature_names: kept,
            rows,
        })
    }

    /// Densify; any surviving MISSING value is an error.
    pub fn to_dense(&self) -> Result<DenseMatrix, FeatureError> {
        let mut columns = vec![Vec::with_capacity(self.rows.len()); self.feature_names.len()];
        for row in &self.rows {
            for (j, name) in self.feature_names.iter().enumerate() {
                match row.values.get(name) {
                    Some(Some(v)) => columns[j].push(*v),
                    Some(None) => {
                        return Err(FeatureError::MissingValue {
                            feature: name.clone(),
                            sentence_id: row.sentence_id.clone(),
                        })
                    }
                    None => {
                        return Err(FeatureError::InconsistentRow {
                            sentence_id: row.sentence_id.clone(),
                        })
                    }
                }
            }
        }
        Ok(DenseMatrix {
            names: self.feature_names.clone(),
            columns,
            n_rows: self.rows.len(),
        })
    }

    /// Write as delimited text: `sentence_id` column first, MISSING as an
    /// empty cell.
    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<(), FeatureError> {
        let path = path.as_ref();
        let to_err = |message: String| FeatureError::Format {
            path: path.display().to_string(),
            message,
        };
        let mut writer = csv::Writer::from_path(path).map_err(|e| to_err(e.to_string()))?;
        let mut header = vec!["sentence_id".to_string()];
        header.extend(self.feature_names.iter().cloned());
        writer.write_record(&header).map_err(|e| to_err(e.to_string()))?;
        for row in &self.rows {
            let mut record = vec![row.sentence_id.clone()];
            for name in &self.feature_names {
                record.push(match row.values.get(name).copied().flatten() {
                    Some(v) => v.to_string(),
                    None => String::new(),
                });
            }
            writer.write_record(&record).map_err(|e| to_err(e.to_string()))?;
        }
        writer.flush().map_err(|e| to_err(e.to_string()))?;
        Ok(())
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<FeatureMatrix, FeatureError> {
        let path = path.as_ref();
        let path_str = path.display().to_string();
        let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => FeatureError::Io {
                path: path_str.clone(),
                source: io,
            },
            kind => FeatureError::Format {
                path: path_str.clone(),
                message: format!("{kind:?}"),
            },
        })?;
        let headers = reader.headers().map_err(|e| FeatureError::Format {
            path: path_str.clone(),
            message: e.to_string(),
        })?;
        let mut names: Vec<String> = headers.iter().map(|h| h.to_string()).collect();
        if names.first().map(String::as_str) != Some("sentence_id") {
            return Err(FeatureError::Format {
                path: path_str,
                message: "first column must be `sentence_id`".to_string(),
            });
        }
        names.remove(0);
        let mut rows = Vec::new();
        for (row_no, record) in reader.records().enumerate() {
            let record = record.map_err(|e| FeatureError::Format {
                path: path_str.clone(),
                message: format!("row {}: {e}", row_no + 1),
            })?;
            let sentence_id = record.get(0).unwrap_or("").to_string();
            let mut values = BTreeMap::new();
            for (j, name) in names.iter().enumerate() {
                let cell = record.get(j + 1).unwrap_or("").trim();
                let value = if cell.is_empty() {
                    None
                } else {
                    Some(cell.parse::<f64>().map_err(|_| FeatureError::Format {
                        path: path_str.clone(),
                        message: format!("row {}: invalid number `{cell}` for `{name}`", row_no + 1),
                    })?)
                };
                values.insert(name.clone(), value);
            }
            rows.push(FeatureVector { sentence_id, values });
        }
        Ok(FeatureMatrix {
            feature_names: names,
            rows,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{LabeledSentence, SplitTag};

    fn corpus_of(texts: &[&str]) -> Corpus {
        Corpus {
            name: "t".to_string(),
            items: texts
                .iter()
                .enumerate()
                .map(|(i, text)| LabeledSentence {
                    sentence: Sentence {
                        id: format!("s{i}"),
                        text: text.to_string(),
                        source: "a".to_string(),
                        experiment_id: None,
                    },
                    mos_complexity: 3.0,
                    mos_understandability: None,
                    mos_lexical: None,
                    n_ratings: 16,
                })
                .collect(),
            split_tag: SplitTag::Unsplit,
        }
    }

    #[test]
    fn matrix_dimensions_match_corpus_and_catalog() {
        let corpus = corpus_of(&[
            "Das ist ein Test.",
            "Die Katze schläft.",
            "Der sehr lange Satz enthält viele ungewöhnliche Wörter.",
        ]);
        let m = extract_matrix(
            &corpus,
            &default_catalog(),
            &Resources::bundled(),
            ExecMode::Sequential,
        );
        assert_eq!(m.n_rows(), 3);
        assert_eq!(m.n_features(), 73);
        m.validate().unwrap();
    }

    #[test]
    fn rows_equal_single_sentence_extraction() {
        let corpus = corpus_of(&["Das ist ein Test.", "Die Katze schläft."]);
        let catalog = default_catalog();
        let resources = Resources::bundled();
        let m = extract_matrix(&corpus, &catalog, &resources, ExecMode::Sequential);
        for item in &corpus.items {
            let single = extract_features(&item.sentence, &catalog, &resources);
            let row = m.rows.iter().find(|r| r.sentence_id == item.sentence.id).unwrap();
            assert_eq!(*row, single);
        }
    }

    #[test]
    fn empty_corpus_gives_zero_rows() {
        let m = extract_matrix(
            &corpus_of(&[]),
            &default_catalog(),
            &Resources::bundled(),
            ExecMode::Sequential,
        );
        assert_eq!(m.n_rows(), 0);
        assert_eq!(m.n_features(), 73);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_extraction_matches_sequential() {
        let corpus = corpus_of(&[
            "Das ist ein Test.",
            "Die Katze schläft tief und fest.",
            "Obwohl es regnete, gingen wir spazieren.",
        ]);
        let catalog = default_catalog();
        let resources = Resources::bundled();
        let seq = extract_matrix(&corpus, &catalog, &resources, ExecMode::Sequential);
        let par = extract_matrix(&corpus, &catalog, &resources, ExecMode::Parallel);
        assert_eq!(seq, par);
    }

    #[test]
    fn csv_round_trip_preserves_missing() {
        let corpus = corpus_of(&["Das ist ein Test.", "***"]);
        let m = extract_matrix(
            &corpus,
            &default_catalog(),
            &Resources::none(),
            ExecMode::Sequential,
        );
        // Resource-free extraction leaves frequency features MISSING.
        assert!(m.rows[0].values["stopword_ratio"].is_none());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("features.csv");
        m.save_csv(&path).unwrap();
        let loaded = FeatureMatrix::load_csv(&path).unwrap();
        assert_eq!(loaded, m);
    }

    #[test]
    fn select_columns_keeps_matrix_order() {
        let corpus = corpus_of(&["Das ist ein Test."]);
        let m = extract_matrix(
            &corpus,
            &default_catalog(),
            &Resources::bundled(),
            ExecMode::Sequential,
        );
        let sub = m
            .select_columns(&["word_count".to_string(), "sentence_char_length".to_string()])
            .unwrap();
        assert_eq!(sub.feature_names, vec!["sentence_char_length", "word_count"]);
        assert_eq!(sub.rows[0].values.len(), 2);
        assert!(m.select_columns(&["nope".to_string()]).is_err());
    }

    #[test]
    fn to_dense_rejects_missing() {
        let corpus = corpus_of(&["Das ist ein Test."]);
        let m = extract_matrix(
            &corpus,
            &default_catalog(),
            &Resources::none(),
            ExecMode::Sequential,
        );
        assert!(matches!(m.to_dense(), Err(FeatureError::MissingValue { .. })));
        let complete = m
            .select_columns(&["word_count".to_string(), "letter_count".to_string()])
            .unwrap();
        let dense = complete.to_dense().unwrap();
        assert_eq!(dense.n_rows, 1);
        assert_eq!(dense.row(0), vec![4.0, 13.0]);
    }
}
