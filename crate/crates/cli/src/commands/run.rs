//! `run`: the full pipeline in one call.
//!
//! Output layout, one subdirectory per stage, each with its own config
//! echo and provenance manifest:
//!
//! ```text
//! out/
//!   config.toml  provenance.json
//!   corpus/      stats.json, histogram plots
//!   split/       train.csv, test.csv
//!   features/    features.csv (train side, canonical order)
//!   baseline/    forest artifact
//!   eval/        per-model reports, compare.md
//!   neural-<mode>/  neural artifact (only with neural.train)
//! ```
//!
//! Later stages read the files earlier stages wrote, not in-memory copies,
//! so running the stages one by one with the echoed config produces
//! byte-identical artifacts.

use std::fs;

use lesbar_core::evaluation::{self, EvalReport};
use lesbar_core::provenance::Provenance;

use crate::args::RunArgs;
use crate::commands::evaluate::{render_eval, COMPARE_FILE};
use crate::commands::model::marker_file;
use crate::commands::{corpus, features, model};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::stage::{ensure_dir, finish_stage, read_corpus};

pub fn run(args: RunArgs, mut config: RunConfig) -> Result<(), CliError> {
    if let Some(v) = args.corpus {
        config.corpus = Some(v);
    }
    if let Some(v) = args.out {
        config.out = Some(v);
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if args.neural {
        config.neural.train = true;
    }
    if let Some(v) = args.neural_mode {
        config.neural.mode = v;
    }
    if let Some(v) = args.encoder {
        config.neural.encoder = Some(v);
    }
    config.validate()?;
    let corpus_path = config.corpus_path()?.to_path_buf();
    let out = config.out_dir()?.to_path_buf();

    // Fail the neural preflight before any stage runs, not after training
    // the baseline.
    #[cfg(feature = "neural")]
    if config.neural.train {
        model::resolve_encoder(&config)?;
    }
    #[cfg(not(feature = "neural"))]
    if config.neural.train {
        return Err(model::no_neural_support());
    }

    let corpus = read_corpus(&corpus_path, &config)?;
    ensure_dir(&out)?;

    let stats = corpus::stats_core(&corpus, &corpus_path, &config, &out.join("corpus"))?;
    println!(
        "corpus: {} sentences, MOS mean {:.2}",
        stats.n, stats.mos_mean
    );

    let (train_path, test_path) =
        corpus::split_core(&corpus, &corpus_path, &config, &out.join("split"))?;
    let train_corpus = read_corpus(&train_path, &config)?;
    println!(
        "split: {} train / {} test (seed {})",
        train_corpus.len(),
        stats.n - train_corpus.len(),
        config.split_seed()
    );

    let matrix = features::extract_core(&train_corpus, &train_path, &config, &out.join("features"))?;
    println!(
        "features: {} x {} matrix",
        matrix.rows.len(),
        matrix.feature_names.len()
    );

    let baseline_dir = out.join("baseline");
    let forest = model::train_forest_core(&train_corpus, &train_path, &config, &baseline_dir)?;
    println!(
        "baseline: {} trees over {} selected features",
        config.baseline.forest.n_trees,
        forest.feature_names.len()
    );

    let eval_dir = out.join("eval");
    let mut reports: Vec<EvalReport> = Vec::new();
    let mut model_markers = Vec::new();
    let (loaded, report) = render_eval(&baseline_dir, &test_path, &config, &eval_dir)?;
    model_markers.push(baseline_dir.join(marker_file(&loaded)));
    reports.push(report);

    if config.neural.train {
        let mode = config.neural.mode;
        let neural_dir = out.join(format!("neural-{mode}"));
        let loss = model::train_neural_core(&train_corpus, &train_path, &config, &neural_dir)?;
        println!("neural-{mode}: final train loss {loss:.4}");
        let (loaded, report) = render_eval(&neural_dir, &test_path, &config, &eval_dir)?;
        model_markers.push(neural_dir.join(marker_file(&loaded)));
        reports.push(report);
    }

    let table = evaluation::compare(&reports);
    let compare_path = eval_dir.join(COMPARE_FILE);
    fs::write(&compare_path, &table)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", compare_path.display())))?;
    let mut manifest = Provenance::new("evaluate")
        .with_input_file("corpus", &test_path)
        .map_err(CliError::runtime)?;
    for (report, marker) in reports.iter().zip(&model_markers) {
        manifest = manifest
            .with_input_file(format!("model:{}", report.model_id), marker)
            .map_err(CliError::runtime)?;
    }
    let manifest = manifest.with_config(&config).map_err(CliError::runtime)?;
    finish_stage(&eval_dir, &config, &manifest)?;

    let manifest = Provenance::new("run")
        .with_seed(config.seed)
        .with_input_file("corpus", &corpus_path)
        .map_err(CliError::runtime)?
        .with_config(&config)
        .map_err(CliError::runtime)?;
    finish_stage(&out, &config, &manifest)?;

    print!("{table}");
    println!("run complete -> {}", out.display());
    Ok(())
}
