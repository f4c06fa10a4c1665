//! `features extract` and `features select`.
//!
//! Rows are always in canonical order (sorted by sentence id), the same
//! order training uses, so a saved matrix fed back through `select`
//! produces byte-identical outputs to the fused extract-and-select path.

use std::path::Path;

use lesbar_core::corpus::Corpus;
use lesbar_core::features::{
    default_catalog, extract_matrix, select_features, FeatureMatrix, Resources, SelectionOutcome,
};
use lesbar_core::provenance::Provenance;
use lesbar_core::ExecMode;

use crate::args::{FeaturesExtractArgs, FeaturesSelectArgs};
use crate::commands::corpus::write_json;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::stage::{ensure_dir, finish_stage, read_corpus};

pub const FEATURES_FILE: &str = "features.csv";
pub const SELECTION_FILE: &str = "selection.json";
pub const SELECTED_FILE: &str = "selected-features.csv";

/// The sentence order shared by extraction and training.
pub(crate) fn canonical(corpus: &Corpus) -> Corpus {
    let mut canonical = corpus.clone();
    canonical
        .items
        .sort_by(|a, b| a.sentence.id.cmp(&b.sentence.id));
    canonical
}

fn build_resources(config: &RunConfig) -> Result<Resources, CliError> {
    Resources::from_config(&config.baseline.resources)
        .map_err(|e| CliError::validation(format!("feature resources: {e}")))
}

pub fn extract(args: FeaturesExtractArgs, mut config: RunConfig) -> Result<(), CliError> {
    if let Some(v) = args.corpus {
        config.corpus = Some(v);
    }
    if let Some(v) = args.out {
        config.out = Some(v);
    }
    config.validate()?;
    let corpus_path = config.corpus_path()?.to_path_buf();
    let out = config.out_dir()?.to_path_buf();
    let corpus = read_corpus(&corpus_path, &config)?;

    let matrix = extract_core(&corpus, &corpus_path, &config, &out)?;
    println!(
        "extracted {} features for {} sentences -> {}",
        matrix.feature_names.len(),
        matrix.rows.len(),
        out.join(FEATURES_FILE).display()
    );
    Ok(())
}

/// Extract the full matrix in canonical order and write `features.csv`.
pub(crate) fn extract_core(
    corpus: &Corpus,
    corpus_path: &Path,
    config: &RunConfig,
    dir: &Path,
) -> Result<FeatureMatrix, CliError> {
    ensure_dir(dir)?;
    let resources = build_resources(config)?;
    let corpus = canonical(corpus);
    let matrix = extract_matrix(&corpus, &default_catalog(), &resources, ExecMode::default());
    matrix
        .save_csv(dir.join(FEATURES_FILE))
        .map_err(|e| CliError::stage("extract", e))?;
    let manifest = Provenance::new("features-extract")
        .with_input_file("corpus", corpus_path)
        .map_err(CliError::runtime)?
        .with_config(config)
        .map_err(CliError::runtime)?;
    finish_stage(dir, config, &manifest)?;
    Ok(matrix)
}

pub fn select(args: FeaturesSelectArgs, mut config: RunConfig) -> Result<(), CliError> {
    if let Some(v) = args.corpus {
        config.corpus = Some(v);
    }
    if let Some(v) = args.out {
        config.out = Some(v);
    }
    if let Some(v) = args.k {
        config.baseline.selection.k = Some(v);
    }
    config.validate()?;
    let corpus_path = config.corpus_path()?.to_path_buf();
    let out = config.out_dir()?.to_path_buf();
    let corpus = canonical(&read_corpus(&corpus_path, &config)?);

    // The matrix either comes from a `features extract` file or is
    // extracted on the fly; either way targets are joined by sentence id.
    let matrix = match &args.features {
        Some(path) => FeatureMatrix::load_csv(path).map_err(CliError::validation)?,
        None => {
            let resources = build_resources(&config)?;
            extract_matrix(&corpus, &default_catalog(), &resources, ExecMode::default())
        }
    };
    let mut targets = Vec::with_capacity(matrix.rows.len());
    for row in &matrix.rows {
        let item = corpus.get(&row.sentence_id).ok_or_else(|| {
            CliError::validation(format!(
                "feature row `{}` has no sentence in the corpus",
                row.sentence_id
            ))
        })?;
        targets.push(item.mos_complexity);
    }

    ensure_dir(&out)?;
    let outcome = select_features(
        &matrix,
        &targets,
        &config.baseline.selection,
        ExecMode::default(),
    )
    .map_err(|e| CliError::stage("select", e))?;
    write_selected(&out, &matrix, &outcome)?;
    write_json(&out.join(SELECTION_FILE), &outcome.report)?;

    let mut manifest = Provenance::new("features-select")
        .with_seed(config.baseline.selection.rfe_forest.seed)
        .with_input_file("corpus", &corpus_path)
        .map_err(CliError::runtime)?;
    if let Some(path) = &args.features {
        manifest = manifest
            .with_input_file("features", path)
            .map_err(CliError::runtime)?;
    }
    let manifest = manifest.with_config(&config).map_err(CliError::runtime)?;
    finish_stage(&out, &config, &manifest)?;
    println!(
        "kept {} of {} features -> {}",
        outcome.report.kept.len(),
        matrix.feature_names.len(),
        out.display()
    );
    Ok(())
}

/// Write the selected, imputed matrix as CSV, rows in matrix order.
fn write_selected(
    dir: &Path,
    source: &FeatureMatrix,
    outcome: &SelectionOutcome,
) -> Result<(), CliError> {
    let path = dir.join(SELECTED_FILE);
    let to_err =
        |e: csv::Error| CliError::runtime(format!("cannot write {}: {e}", path.display()));
    let mut writer = csv::Writer::from_path(&path)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
    let mut header = vec!["sentence_id".to_string()];
    header.extend(outcome.matrix.names.iter().cloned());
    writer.write_record(&header).map_err(to_err)?;
    for (i, row) in source.rows.iter().enumerate() {
        let mut record = vec![row.sentence_id.clone()];
        record.extend(outcome.matrix.row(i).iter().map(|v| v.to_string()));
        writer.write_record(&record).map_err(to_err)?;
    }
    writer
        .flush()
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))
}
