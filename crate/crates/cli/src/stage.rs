//! Shared stage plumbing: output directories, the config echo plus
//! provenance manifest every stage leaves behind, and model loading.

use std::fs;
use std::path::Path;

use lesbar_core::baseline::{ForestModel, MODEL_FILE};
use lesbar_core::corpus::{load_corpus, Corpus};
use lesbar_core::evaluation::Predictor;
use lesbar_core::provenance::{write_manifest, Provenance};

use crate::config::RunConfig;
use crate::error::CliError;

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", dir.display())))
}

/// Leave the stage's paper trail: the resolved config echo and the
/// provenance manifest.
pub fn finish_stage(dir: &Path, config: &RunConfig, manifest: &Provenance) -> Result<(), CliError> {
    config.echo(dir)?;
    write_manifest(dir, manifest).map_err(CliError::runtime)
}

/// Load a labeled corpus, reporting warnings on stderr. Failures are
/// validation errors: the input never reached any work.
pub fn read_corpus(path: &Path, config: &RunConfig) -> Result<Corpus, CliError> {
    let outcome = load_corpus(path, &config.schema)
        .map_err(|e| CliError::validation(format!("corpus {}: {e}", path.display())))?;
    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(outcome.corpus)
}

/// A model artifact directory, whichever kind it holds.
pub enum LoadedModel {
    Forest(Box<ForestModel>),
    #[cfg(feature = "neural")]
    Neural(Box<lesbar_neural::NeuralModel>),
}

impl LoadedModel {
    /// Detect the artifact kind by its marker file and load it. A neural
    /// artifact in a build without neural support is a validation error.
    pub fn load(dir: &Path) -> Result<LoadedModel, CliError> {
        if !dir.is_dir() {
            return Err(CliError::validation(format!(
                "model directory {} does not exist",
                dir.display()
            )));
        }
        if dir.join(MODEL_FILE).is_file() {
            let model = ForestModel::load(dir)
                .map_err(|e| CliError::validation(format!("model {}: {e}", dir.display())))?;
            return Ok(LoadedModel::Forest(Box::new(model)));
        }
        if dir.join(NEURAL_MARKER).is_file() {
            return load_neural(dir);
        }
        Err(CliError::validation(format!(
            "no model artifact in {}: expected {MODEL_FILE} or {NEURAL_MARKER}",
            dir.display()
        )))
    }

    pub fn predictor(&self) -> &dyn Predictor {
        match self {
            LoadedModel::Forest(model) => model.as_ref(),
            #[cfg(feature = "neural")]
            LoadedModel::Neural(model) => model.as_ref(),
        }
    }
}

#[cfg(feature = "neural")]
const NEURAL_MARKER: &str = lesbar_neural::NEURAL_MODEL_FILE;
#[cfg(not(feature = "neural"))]
const NEURAL_MARKER: &str = "neural.json";

#[cfg(feature = "neural")]
fn load_neural(dir: &Path) -> Result<LoadedModel, CliError> {
    let model = lesbar_neural::NeuralModel::load(dir)
        .map_err(|e| CliError::validation(format!("model {}: {e}", dir.display())))?;
    Ok(LoadedModel::Neural(Box::new(model)))
}

#[cfg(not(feature = "neural"))]
fn load_neural(dir: &Path) -> Result<LoadedModel, CliError> {
    Err(CliError::validation(format!(
        "{} is a neural model, but this build has no neural support; \
         reinstall with the `neural` feature",
        dir.display()
    )))
}
