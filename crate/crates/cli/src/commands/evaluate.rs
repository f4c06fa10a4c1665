//! `evaluate` and `compare`.

use std::path::Path;

use lesbar_core::evaluation::{self, load_report, render_report, EvalReport};
use lesbar_core::provenance::Provenance;

use crate::args::{CompareArgs, EvaluateArgs};
use crate::commands::model::marker_file;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::stage::{ensure_dir, finish_stage, read_corpus, LoadedModel};

pub const COMPARE_FILE: &str = "compare.md";

pub fn evaluate(args: EvaluateArgs, mut config: RunConfig) -> Result<(), CliError> {
    if let Some(v) = args.corpus {
        config.corpus = Some(v);
    }
    if let Some(v) = args.out {
        config.out = Some(v);
    }
    if let Some(v) = args.bin_width {
        config.evaluation.prediction_bin_width = v;
    }
    config.validate()?;
    let corpus_path = config.corpus_path()?.to_path_buf();
    let out = config.out_dir()?.to_path_buf();

    let report = evaluate_core(&args.model, &corpus_path, &config, &out)?;
    println!(
        "{}: RMSE {:.3}, Pearson {:.3}, Spearman {:.3} over {} sentences -> {}",
        report.model_id, report.rmse, report.pearson, report.spearman, report.n,
        out.display()
    );
    Ok(())
}

/// Evaluate the artifact at `model_dir` on the corpus file and render the
/// report into `dir`. Leaves no paper trail; callers own the manifest.
pub(crate) fn render_eval(
    model_dir: &Path,
    corpus_path: &Path,
    config: &RunConfig,
    dir: &Path,
) -> Result<(LoadedModel, EvalReport), CliError> {
    let model = LoadedModel::load(model_dir)?;
    let corpus = read_corpus(corpus_path, config)?;
    ensure_dir(dir)?;
    let report = evaluation::evaluate(
        model.predictor(),
        &corpus,
        config.evaluation.prediction_bin_width,
    )
    .map_err(|e| CliError::stage("evaluate", e))?;
    let rendered = render_report(&report, dir).map_err(|e| CliError::stage("evaluate", e))?;
    for warning in &rendered.warnings {
        eprintln!("warning: {warning}");
    }
    Ok((model, report))
}

/// `render_eval` plus the stage paper trail, for the standalone command.
pub(crate) fn evaluate_core(
    model_dir: &Path,
    corpus_path: &Path,
    config: &RunConfig,
    dir: &Path,
) -> Result<EvalReport, CliError> {
    let (model, report) = render_eval(model_dir, corpus_path, config, dir)?;
    let manifest = Provenance::new("evaluate")
        .with_input_file("corpus", corpus_path)
        .map_err(CliError::runtime)?
        .with_input_file("model", model_dir.join(marker_file(&model)))
        .map_err(CliError::runtime)?
        .with_config(config)
        .map_err(CliError::runtime)?;
    finish_stage(dir, config, &manifest)?;
    Ok(report)
}

pub fn compare(args: CompareArgs, mut config: RunConfig) -> Result<(), CliError> {
    if let Some(v) = args.out {
        config.out = Some(v);
    }
    config.validate()?;
    let mut reports = Vec::with_capacity(args.reports.len());
    for path in &args.reports {
        reports.push(load_report(path).map_err(|e| {
            CliError::validation(format!("report {}: {e}", path.display()))
        })?);
    }

    let table = evaluation::compare(&reports);
    print!("{table}");
    if config.out.is_some() {
        let out = config.out_dir()?.to_path_buf();
        ensure_dir(&out)?;
        compare_core(&reports, &args.reports, &config, &out)?;
    }
    Ok(())
}

/// Write `compare.md` from already-loaded reports.
pub(crate) fn compare_core(
    reports: &[EvalReport],
    report_paths: &[std::path::PathBuf],
    config: &RunConfig,
    dir: &Path,
) -> Result<(), CliError> {
    ensure_dir(dir)?;
    let table = evaluation::compare(reports);
    let path = dir.join(COMPARE_FILE);
    std::fs::write(&path, &table)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
    let mut manifest = Provenance::new("compare");
    for (report, report_path) in reports.iter().zip(report_paths) {
        manifest = manifest
            .with_input_file(format!("report:{}", report.model_id), report_path)
            .map_err(CliError::runtime)?;
    }
    let manifest = manifest.with_config(config).map_err(CliError::runtime)?;
    finish_stage(dir, config, &manifest)
}
