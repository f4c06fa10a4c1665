//! The run configuration: one TOML file drives every subcommand.
//!
//! Resolution order is fixed: built-in defaults, then the `--config` file,
//! then command-line flags, each flag overriding exactly one key. Unknown
//! keys are rejected. The fully resolved configuration is echoed as
//! `config.toml` into every output directory, so any artifact can be
//! reproduced from the echo alone.
//!
//! Seeds: `seed` is the master seed and feeds the stages whose own seed key
//! is unset (`split.seed`, `neural.seed`). The forest never derives from it;
//! `baseline.forest.seed` and `baseline.selection.rfe_forest.seed` are
//! ordinary keys with their own defaults. This keeps a stage run on its own
//! byte-identical to the same stage inside `run`.

use std::fs;
use std::path::{Path, PathBuf};

use lesbar_core::baseline::BaselineConfig;
use lesbar_core::corpus::CorpusSchema;
use lesbar_core::forest::{FeaturesPerSplit, ForestConfig};
use lesbar_core::ratings::CleaningConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// File name of the resolved-config echo in every output directory.
pub const CONFIG_ECHO_FILE: &str = "config.toml";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Labeled corpus file most commands read. Flags may override it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus: Option<PathBuf>,
    /// Output directory. Flags may override it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Master seed; see the module docs for exactly what it feeds.
    pub seed: u64,
    pub split: SplitSettings,
    pub stats: StatsSettings,
    pub schema: CorpusSchema,
    pub cleaning: CleaningConfig,
    pub baseline: BaselineConfig,
    pub evaluation: EvaluationSettings,
    pub neural: NeuralSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSettings {
    pub train_fraction: f64,
    /// Falls back to the master seed when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for SplitSettings {
    fn default() -> Self {
        SplitSettings {
            train_fraction: 0.75,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatsSettings {
    /// Sentence-length histogram bin width, in characters.
    pub length_bin: u32,
    /// MOS histogram bin width.
    pub mos_bin: f64,
}

impl Default for StatsSettings {
    fn default() -> Self {
        StatsSettings {
            length_bin: 10,
            mos_bin: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationSettings {
    /// Bin width of the prediction-distribution histogram in reports.
    pub prediction_bin_width: f64,
}

impl Default for EvaluationSettings {
    fn default() -> Self {
        EvaluationSettings {
            prediction_bin_width: lesbar_core::evaluation::DEFAULT_PREDICTION_BIN_WIDTH,
        }
    }
}

/// Which neural mode a config or flag names.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum NeuralModeName {
    #[default]
    Frozen,
    FineTuned,
}

impl std::fmt::Display for NeuralModeName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NeuralModeName::Frozen => write!(f, "frozen"),
            NeuralModeName::FineTuned => write!(f, "fine-tuned"),
        }
    }
}

/// Neural-stage settings. Hyperparameters are optional so the library
/// defaults stay in one place; values set here override them, and the
/// builds without neural support still parse the file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NeuralSettings {
    /// Whether `run` trains a neural model after the baseline.
    pub train: bool,
    pub mode: NeuralModeName,
    /// Encoder checkpoint directory; falls back to the `LESBAR_ENCODER`
    /// environment variable when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub encoder: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dropout: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_seq_len: Option<usize>,
    /// Frozen mode only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation_fraction: Option<f64>,
    /// Frozen mode only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gru_hidden: Option<usize>,
    /// Frozen mode only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gru_layers: Option<usize>,
    /// Falls back to the master seed when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[cfg(feature = "neural")]
impl NeuralSettings {
    /// Library defaults with the set overrides applied.
    pub fn frozen_config(&self, master_seed: u64) -> lesbar_neural::FrozenConfig {
        let mut c = lesbar_neural::FrozenConfig::default();
        if let Some(v) = self.gru_hidden {
            c.gru_hidden = v;
        }
        if let Some(v) = self.gru_layers {
            c.gru_layers = v;
        }
        if let Some(v) = self.dropout {
            c.dropout = v;
        }
        if let Some(v) = self.learning_rate {
            c.learning_rate = v;
        }
        if let Some(v) = self.batch_size {
            c.batch_size = v;
        }
        if let Some(v) = self.epochs {
            c.epochs = v;
        }
        if let Some(v) = self.max_seq_len {
            c.max_seq_len = v;
        }
        if let Some(v) = self.validation_fraction {
            c.validation_fraction = v;
        }
        c.seed = self.seed.unwrap_or(master_seed);
        c
    }

    /// Library defaults with the set overrides applied.
    pub fn fine_tune_config(&self, master_seed: u64) -> lesbar_neural::FineTuneConfig {
        let mut c = lesbar_neural::FineTuneConfig::default();
        if let Some(v) = self.learning_rate {
            c.learning_rate = v;
        }
        if let Some(v) = self.batch_size {
            c.batch_size = v;
        }
        if let Some(v) = self.epochs {
            c.epochs = v;
        }
        if let Some(v) = self.dropout {
            c.dropout = v;
        }
        if let Some(v) = self.max_seq_len {
            c.max_seq_len = v;
        }
        c.seed = self.seed.unwrap_or(master_seed);
        c
    }
}

fn bad(key: &str, requirement: &str) -> CliError {
    CliError::validation(format!("config: {key} {requirement}"))
}

fn check_forest(prefix: &str, forest: &ForestConfig) -> Result<(), CliError> {
    if forest.n_trees == 0 {
        return Err(bad(&format!("{prefix}.n_trees"), "must be at least 1"));
    }
    if forest.min_samples_leaf == 0 {
        return Err(bad(&format!("{prefix}.min_samples_leaf"), "must be at least 1"));
    }
    if forest.max_bins < 2 || forest.max_bins > u16::MAX as usize {
        return Err(bad(&format!("{prefix}.max_bins"), "must lie in 2..=65535"));
    }
    if let FeaturesPerSplit::Fraction(f) = forest.features_per_split {
        if f.is_nan() || f <= 0.0 || f > 1.0 {
            return Err(bad(
                &format!("{prefix}.features_per_split"),
                "fraction must lie in (0, 1]",
            ));
        }
    }
    Ok(())
}

impl RunConfig {
    /// Defaults when `path` is `None`, otherwise the parsed file. Parse
    /// and range problems are validation errors naming the offending key.
    pub fn load(path: Option<&Path>) -> Result<RunConfig, CliError> {
        let config = match path {
            None => RunConfig::default(),
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::validation(format!("cannot read config {}: {e}", path.display()))
                })?;
                toml::from_str(&text).map_err(|e| {
                    CliError::validation(format!("config {}: {e}", path.display()))
                })?
            }
        };
        config.validate()?;
        Ok(config)
    }

    /// Range checks over every key a subcommand might use, so a bad value
    /// fails the run before any work no matter which stage would hit it.
    pub fn validate(&self) -> Result<(), CliError> {
        let f = self.split.train_fraction;
        if f.is_nan() || f <= 0.0 || f >= 1.0 {
            return Err(bad("split.train_fraction", "must lie in (0, 1)"));
        }
        if self.stats.length_bin == 0 {
            return Err(bad("stats.length_bin", "must be at least 1"));
        }
        if self.stats.mos_bin <= 0.0 || !self.stats.mos_bin.is_finite() {
            return Err(bad("stats.mos_bin", "must be a positive number"));
        }
        if self.evaluation.prediction_bin_width <= 0.0
            || !self.evaluation.prediction_bin_width.is_finite()
        {
            return Err(bad("evaluation.prediction_bin_width", "must be a positive number"));
        }
        if self.cleaning.min_duration_seconds < 0.0
            || !self.cleaning.min_duration_seconds.is_finite()
        {
            return Err(bad("cleaning.min_duration_seconds", "must be a non-negative number"));
        }
        if self.cleaning.min_variance < 0.0 || !self.cleaning.min_variance.is_finite() {
            return Err(bad("cleaning.min_variance", "must be a non-negative number"));
        }
        check_forest("baseline.forest", &self.baseline.forest)?;
        check_forest("baseline.selection.rfe_forest", &self.baseline.selection.rfe_forest)?;
        let selection = &self.baseline.selection;
        if let Some(f) = selection.max_missing_fraction {
            if !(0.0..=1.0).contains(&f) {
                return Err(bad("baseline.selection.max_missing_fraction", "must lie in [0, 1]"));
            }
        }
        if let Some(t) = selection.correlation_threshold {
            if t.is_nan() || t <= 0.0 || t > 1.0 {
                return Err(bad("baseline.selection.correlation_threshold", "must lie in (0, 1]"));
            }
        }
        if selection.k == Some(0) {
            return Err(bad("baseline.selection.k", "must be at least 1"));
        }
        let neural = &self.neural;
        if let Some(lr) = neural.learning_rate {
            if lr <= 0.0 || !lr.is_finite() {
                return Err(bad("neural.learning_rate", "must be a positive number"));
            }
        }
        if neural.batch_size == Some(0) {
            return Err(bad("neural.batch_size", "must be at least 1"));
        }
        if neural.epochs == Some(0) {
            return Err(bad("neural.epochs", "must be at least 1"));
        }
        if let Some(d) = neural.dropout {
            if !(0.0..1.0).contains(&d) {
                return Err(bad("neural.dropout", "must lie in [0, 1)"));
            }
        }
        if let Some(len) = neural.max_seq_len {
            if len < 3 {
                return Err(bad("neural.max_seq_len", "must fit [CLS], a token and [SEP]"));
            }
        }
        if let Some(f) = neural.validation_fraction {
            if !(0.0..1.0).contains(&f) {
                return Err(bad("neural.validation_fraction", "must lie in [0, 1)"));
            }
        }
        if neural.gru_hidden == Some(0) {
            return Err(bad("neural.gru_hidden", "must be at least 1"));
        }
        if neural.gru_layers == Some(0) {
            return Err(bad("neural.gru_layers", "must be at least 1"));
        }
        Ok(())
    }

    /// The corpus path every corpus-reading command resolves.
    pub fn corpus_path(&self) -> Result<&Path, CliError> {
        self.corpus.as_deref().ok_or_else(|| {
            CliError::validation("no corpus given: pass --corpus or set `corpus` in the config")
        })
    }

    /// The output directory every writing command resolves.
    pub fn out_dir(&self) -> Result<&Path, CliError> {
        self.out.as_deref().ok_or_else(|| {
            CliError::validation("no output directory given: pass --out or set `out` in the config")
        })
    }

    /// Effective seed of the corpus split.
    pub fn split_seed(&self) -> u64 {
        self.split.seed.unwrap_or(self.seed)
    }

    /// Write the resolved config as `config.toml` into `dir`.
    pub fn echo(&self, dir: &Path) -> Result<(), CliError> {
        let text = toml::to_string_pretty(self)
            .map_err(|e| CliError::runtime(format!("cannot serialize config: {e}")))?;
        let path = dir.join(CONFIG_ECHO_FILE);
        fs::write(&path, text)
            .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))
    }
}
