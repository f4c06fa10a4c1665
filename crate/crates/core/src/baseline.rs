//! The feature-based baseline: selection plus a random forest, packaged as
//! a self-contained model that scores raw sentences.
//!
//! Training canonicalizes row order by sentence id before anything touches
//! an RNG, so permuting the input corpus cannot change the model. The saved
//! artifact carries everything prediction needs: the selected feature
//! names, their imputation means, the resource configuration and the
//! forest itself.

use crate::corpus::{validate_corpus, Corpus, CorpusError, Sentence, MOS_MAX, MOS_MIN};
use crate::evaluation::{PredictionFailure, Predictor};
use crate::exec::ExecMode;
use crate::features::{
    default_catalog, extract_matrix, select_features, FeatureCatalog, FeatureError,
    ResourceConfig, Resources, SelectionConfig, SelectionError, SelectionReport,
};
use crate::forest::{Forest, ForestConfig, ForestError};
use crate::provenance::{self, Provenance, ProvenanceError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const MODEL_FILE: &str = "model.json";
pub const FOREST_FILE: &str = "forest.bin";
pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    pub forest: ForestConfig,
    pub selection: SelectionConfig,
    pub resources: ResourceConfig,
    /// Clamp predictions to the MOS scale. Off by default: the forest
    /// already stays inside the observed target range.
    pub clamp_to_mos: bool,
}

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("cannot train on an empty corpus")]
    EmptyCorpus,
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Provenance(#[from] ProvenanceError),
    #[error("resource setup: {0}")]
    Resource(std::io::Error),
    #[error("i/o on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed model file {path}: {message}")]
    Format { path: PathBuf, message: String },
}

/// A trained baseline. Holds the rebuilt [`Resources`] so prediction never
/// touches the filesystem.
#[derive(Debug)]
pub struct ForestModel {
    pub forest: Forest,
    /// Selected features, matrix order; one forest column each.
    pub feature_names: Vec<String>,
    pub imputation_means: BTreeMap<String, f64>,
    pub selection_report: SelectionReport,
    pub config: BaselineConfig,
    pub clamp: Option<(f64, f64)>,
    catalog: FeatureCatalog,
    resources: Resources,
}

/// Everything except the forest, stored as JSON next to it.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    schema_version: u32,
    feature_names: Vec<String>,
    imputation_means: BTreeMap<String, f64>,
    selection_report: SelectionReport,
    config: BaselineConfig,
    clamp: Option<(f64, f64)>,
}

pub fn train_baseline(
    corpus: &Corpus,
    config: &BaselineConfig,
    mode: ExecMode,
) -> Result<ForestModel, BaselineError> {
    if corpus.is_empty() {
        return Err(BaselineError::EmptyCorpus);
    }
    validate_corpus(corpus, 1)?;
    let resources = Resources::from_config(&config.resources).map_err(BaselineError::Resource)?;

    let mut canonical = corpus.clone();
    canonical
        .items
        .sort_by(|a, b| a.sentence.id.cmp(&b.sentence.id));
    let targets: Vec<f64> = canonical.items.iter().map(|l| l.mos_complexity).collect();

    let catalog = default_catalog();
    let matrix = extract_matrix(&canonical, &catalog, &resources, mode);
    let outcome = select_features(&matrix, &targets, &config.selection, mode)?;
    let forest = crate::forest::train(&outcome.matrix.columns, &targets, &config.forest, mode)?;

    let selected = catalog.subset(&outcome.matrix.names)?;
    Ok(ForestModel {
        forest,
        feature_names: outcome.matrix.names,
        imputation_means: outcome.report.imputation_means.clone(),
        selection_report: outcome.report,
        config: config.clone(),
        clamp: config.clamp_to_mos.then_some((MOS_MIN, MOS_MAX)),
        catalog: selected,
        resources,
    })
}

impl ForestModel {
    /// Feature row in `feature_names` order, MISSING imputed from the
    /// training means.
    fn feature_row(&self, sentence: &Sentence) -> Vec<f64> {
        let vector = crate::features::extract_features(sentence, &self.catalog, &self.resources);
        self.feature_names
            .iter()
            .map(|name| {
                vector
                    .get(name)
                    .flatten()
                    .unwrap_or_else(|| self.imputation_means.get(name).copied().unwrap_or(0.0))
            })
            .collect()
    }

    pub fn predict_sentence(&self, sentence: &Sentence) -> f64 {
        let row = self.feature_row(sentence);
        let raw = self
            .forest
            .predict_row(&row)
            .expect("model row length matches its forest");
        match self.clamp {
            Some((lo, hi)) => raw.clamp(lo, hi),
            None => raw,
        }
    }

    pub fn predict_sentences(&self, sentences: &[Sentence], mode: ExecMode) -> Vec<f64> {
        crate::exec::map_slice(mode, sentences, |s| self.predict_sentence(s))
    }

    /// Importances paired with their feature names, forest order, sum 1.
    pub fn importances(&self) -> Vec<(String, f64)> {
        self.feature_names
            .iter()
            .cloned()
            .zip(self.forest.importances().iter().copied())
            .collect()
    }

    /// Write `model.json`, `forest.bin` and `provenance.json` into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>, manifest: &Provenance) -> Result<(), BaselineError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|source| BaselineError::Io {
            path: dir.to_path_buf(),
            source,
        })?;

        let forest_path = dir.join(FOREST_FILE);
        let mut buf = Vec::new();
        self.forest.write_to(&mut buf)?;
        fs::write(&forest_path, buf).map_err(|source| BaselineError::Io {
            path: forest_path,
            source,
        })?;

        let file = ModelFile {
            schema_version: MODEL_SCHEMA_VERSION,
            feature_names: self.feature_names.clone(),
            imputation_means: self.imputation_means.clone(),
            selection_report: self.selection_report.clone(),
            config: self.config.clone(),
            clamp: self.clamp,
        };
        let model_path = dir.join(MODEL_FILE);
        let mut json = serde_json::to_vec_pretty(&file).map_err(|e| BaselineError::Format {
            path: model_path.clone(),
            message: e.to_string(),
        })?;
        json.push(b'\n');
        fs::write(&model_path, json).map_err(|source| BaselineError::Io {
            path: model_path,
            source,
        })?;

        provenance::write_manifest(dir, manifest)?;
        Ok(())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<ForestModel, BaselineError> {
        let dir = dir.as_ref();
        let model_path = dir.join(MODEL_FILE);
        let bytes = fs::read(&model_path).map_err(|source| BaselineError::Io {
            path: model_path.clone(),
            source,
        })?;
        let file: ModelFile =
            serde_json::from_slice(&bytes).map_err(|e| BaselineError::Format {
                path: model_path.clone(),
                message: e.to_string(),
            })?;
        if file.schema_version != MODEL_SCHEMA_VERSION {
            return Err(BaselineError::Format {
                path: model_path.clone(),
                message: format!(
                    "schema version {} unsupported (expected {MODEL_SCHEMA_VERSION})",
                    file.schema_version
                ),
            });
        }

        let forest_path = dir.join(FOREST_FILE);
        let forest_bytes = fs::read(&forest_path).map_err(|source| BaselineError::Io {
            path: forest_path.clone(),
            source,
        })?;
        let forest = Forest::read_from(forest_bytes.as_slice())?;
        if forest.n_features != file.feature_names.len() {
            return Err(BaselineError::Format {
                path: forest_path,
                message: format!(
                    "forest expects {} features but the model lists {}",
                    forest.n_features,
                    file.feature_names.len()
                ),
            });
        }

        let resources =
            Resources::from_config(&file.config.resources).map_err(BaselineError::Resource)?;
        let catalog = default_catalog().subset(&file.feature_names)?;
        Ok(ForestModel {
            forest,
            feature_names: file.feature_names,
            imputation_means: file.imputation_means,
            selection_report: file.selection_report,
            config: file.config,
            clamp: file.clamp,
            catalog,
            resources,
        })
    }
}

impl Predictor for ForestModel {
    fn model_id(&self) -> String {
        "baseline-forest".to_string()
    }

    fn predict(&self, sentences: &[Sentence]) -> Result<Vec<f64>, PredictionFailure> {
        Ok(self.predict_sentences(sentences, ExecMode::default()))
    }
}

/// Trivial reference predictor: the training-set mean for every sentence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanPredictor {
    pub mean: f64,
}

impl MeanPredictor {
    pub fn fit(corpus: &Corpus) -> Result<Self, BaselineError> {
        if corpus.is_empty() {
            return Err(BaselineError::EmptyCorpus);
        }
        let mean = corpus.mos_values().iter().sum::<f64>() / corpus.len() as f64;
        Ok(MeanPredictor { mean })
    }
}

impl Predictor for MeanPredictor {
    fn model_id(&self) -> String {
        "mean".to_string()
    }

    fn predict(&self, sentences: &[Sentence]) -> Result<Vec<f64>, PredictionFailure> {
        Ok(vec![self.mean; sentences.len()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::split_corpus;
    use crate::evaluation::rmse;
    use crate::synthetic::synthetic_corpus;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quick_config() -> BaselineConfig {
        BaselineConfig {
            forest: ForestConfig {
                n_trees: 40,
                max_depth: Some(10),
                min_samples_leaf: 2,
                max_bins: 64,
                seed: 7,
                ..ForestConfig::default()
            },
            selection: SelectionConfig {
                k: Some(8),
                rfe_forest: ForestConfig {
                    n_trees: 15,
                    max_depth: Some(8),
                    min_samples_leaf: 5,
                    max_bins: 32,
                    seed: 7,
                    ..ForestConfig::default()
                },
                ..SelectionConfig::default()
            },
            ..BaselineConfig::default()
        }
    }

    #[test]
    fn beats_mean_predictor_out_of_sample() {
        let corpus = synthetic_corpus(240, 5);
        let (train, test) = split_corpus(&corpus, 0.75, 3).unwrap();
        let model = train_baseline(&train, &quick_config(), ExecMode::Sequential).unwrap();
        let preds = model.predict_sentences(&test.sentences(), ExecMode::Sequential);
        let forest_rmse = rmse(&preds, &test.mos_values()).unwrap();

        let mean = MeanPredictor::fit(&train).unwrap();
        let mean_preds = mean.predict(&test.sentences()).unwrap();
        let mean_rmse = rmse(&mean_preds, &test.mos_values()).unwrap();
        assert!(
            forest_rmse < 0.6 * mean_rmse,
            "forest {forest_rmse} vs mean {mean_rmse}"
        );
    }

    #[test]
    fn training_is_invariant_to_row_permutation() {
        let corpus = synthetic_corpus(80, 11);
        let mut shuffled = corpus.clone();
        shuffled.items.shuffle(&mut ChaCha8Rng::seed_from_u64(99));
        assert_ne!(corpus.items, shuffled.items);

        let a = train_baseline(&corpus, &quick_config(), ExecMode::Sequential).unwrap();
        let b = train_baseline(&shuffled, &quick_config(), ExecMode::Sequential).unwrap();
        assert_eq!(a.feature_names, b.feature_names);
        assert_eq!(a.importances(), b.importances());
        let probe = corpus.sentences();
        assert_eq!(
            a.predict_sentences(&probe, ExecMode::Sequential),
            b.predict_sentences(&probe, ExecMode::Sequential)
        );
    }

    #[test]
    fn artifact_round_trip_preserves_predictions() {
        let corpus = synthetic_corpus(70, 13);
        let model = train_baseline(&corpus, &quick_config(), ExecMode::Sequential).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let manifest = Provenance::new("train")
            .with_seed(model.config.forest.seed)
            .with_config(&model.config)
            .unwrap();
        model.save(dir.path(), &manifest).unwrap();

        let loaded = ForestModel::load(dir.path()).unwrap();
        assert_eq!(loaded.feature_names, model.feature_names);
        assert_eq!(loaded.imputation_means, model.imputation_means);
        assert_eq!(loaded.selection_report, model.selection_report);
        let probe = corpus.sentences();
        assert_eq!(
            loaded.predict_sentences(&probe, ExecMode::Sequential),
            model.predict_sentences(&probe, ExecMode::Sequential)
        );
        assert_eq!(
            crate::provenance::read_manifest(dir.path()).unwrap(),
            manifest
        );
    }

    #[test]
    fn load_names_missing_file() {
        let dir = tempfile::tempdir().unwrap();
        let err = ForestModel::load(dir.path()).unwrap_err();
        assert!(err.to_string().contains(MODEL_FILE));
    }

    #[test]
    fn clamp_bounds_predictions() {
        let corpus = synthetic_corpus(60, 17);
        let mut model = train_baseline(&corpus, &quick_config(), ExecMode::Sequential).unwrap();
        model.clamp = Some((3.0, 3.5));
        for sentence in corpus.sentences() {
            let pred = model.predict_sentence(&sentence);
            assert!((3.0..=3.5).contains(&pred));
        }
    }

    #[test]
    fn importances_are_named_and_normalized() {
        let corpus = synthetic_corpus(60, 19);
        let model = train_baseline(&corpus, &quick_config(), ExecMode::Sequential).unwrap();
        let imp = model.importances();
        assert_eq!(imp.len(), model.feature_names.len());
        let total: f64 = imp.iter().map(|(_, v)| v).sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!(imp.iter().all(|(_, v)| *v >= 0.0));
    }

    #[test]
    fn works_through_the_predictor_trait() {
        let corpus = synthetic_corpus(60, 23);
        let model = train_baseline(&corpus, &quick_config(), ExecMode::Sequential).unwrap();
        let report = crate::evaluation::evaluate(&model, &corpus, 0.25).unwrap();
        assert_eq!(report.model_id, "baseline-forest");
        assert_eq!(report.n, 60);
        assert!(report.rmse >= 0.0);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_prediction_matches_sequential() {
        let corpus = synthetic_corpus(50, 29);
        let model = train_baseline(&corpus, &quick_config(), ExecMode::Sequential).unwrap();
        let probe = corpus.sentences();
        assert_eq!(
            model.predict_sentences(&probe, ExecMode::Parallel),
            model.predict_sentences(&probe, ExecMode::Sequential)
        );
    }
}
