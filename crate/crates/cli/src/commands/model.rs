//! `train`, `predict` and `importance`.

use std::path::Path;

use lesbar_core::baseline::train_baseline;
use lesbar_core::corpus::{Corpus, Sentence};
use lesbar_core::provenance::Provenance;
use lesbar_core::ExecMode;

use crate::args::{ImportanceArgs, ModelKind, PredictArgs, TrainArgs};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::stage::{ensure_dir, finish_stage, read_corpus, LoadedModel};

pub const PREDICTIONS_FILE: &str = "predictions.csv";
pub const IMPORTANCE_FILE: &str = "importance.tsv";

pub fn train(args: TrainArgs, mut config: RunConfig) -> Result<(), CliError> {
    if let Some(v) = args.corpus {
        config.corpus = Some(v);
    }
    if let Some(v) = args.out {
        config.out = Some(v);
    }
    if let Some(v) = args.encoder {
        config.neural.encoder = Some(v);
    }
    if let Some(v) = args.trees {
        config.baseline.forest.n_trees = v;
    }
    if let Some(v) = args.learning_rate {
        config.neural.learning_rate = Some(v);
    }
    if let Some(v) = args.batch_size {
        config.neural.batch_size = Some(v);
    }
    if let Some(v) = args.epochs {
        config.neural.epochs = Some(v);
    }
    if let Some(seed) = args.seed {
        match args.model {
            ModelKind::Forest => {
                config.baseline.forest.seed = seed;
                config.baseline.selection.rfe_forest.seed = seed;
            }
            ModelKind::Frozen | ModelKind::FineTuned => config.neural.seed = Some(seed),
        }
    }
    config.validate()?;
    let corpus_path = config.corpus_path()?.to_path_buf();
    let out = config.out_dir()?.to_path_buf();
    let corpus = read_corpus(&corpus_path, &config)?;

    match args.model {
        ModelKind::Forest => {
            let model = train_forest_core(&corpus, &corpus_path, &config, &out)?;
            println!(
                "trained baseline-forest: {} trees over {} features -> {}",
                config.baseline.forest.n_trees,
                model_feature_count(&model),
                out.display()
            );
        }
        ModelKind::Frozen | ModelKind::FineTuned => {
            let mode = match args.model {
                ModelKind::Frozen => crate::config::NeuralModeName::Frozen,
                _ => crate::config::NeuralModeName::FineTuned,
            };
            config.neural.mode = mode;
            let loss = train_neural_core(&corpus, &corpus_path, &config, &out)?;
            println!(
                "trained {mode} model: final train loss {loss:.4} -> {}",
                out.display()
            );
        }
    }
    Ok(())
}

fn model_feature_count(model: &lesbar_core::baseline::ForestModel) -> usize {
    model.feature_names.len()
}

/// Train the forest baseline and save its artifact into `dir`.
pub(crate) fn train_forest_core(
    corpus: &Corpus,
    corpus_path: &Path,
    config: &RunConfig,
    dir: &Path,
) -> Result<lesbar_core::baseline::ForestModel, CliError> {
    ensure_dir(dir)?;
    let model = train_baseline(corpus, &config.baseline, ExecMode::default())
        .map_err(|e| CliError::stage("train", e))?;
    let manifest = Provenance::new("train-forest")
        .with_seed(config.baseline.forest.seed)
        .with_input_file("corpus", corpus_path)
        .map_err(CliError::runtime)?
        .with_config(config)
        .map_err(CliError::runtime)?;
    model
        .save(dir, &manifest)
        .map_err(|e| CliError::stage("train", e))?;
    config.echo(dir)?;
    Ok(model)
}

/// Resolve the encoder checkpoint or explain every way to provide one.
#[cfg(feature = "neural")]
pub(crate) fn resolve_encoder(config: &RunConfig) -> Result<std::path::PathBuf, CliError> {
    let dir = lesbar_neural::resolve_encoder_dir(config.neural.encoder.as_deref()).ok_or_else(
        || {
            CliError::validation(format!(
                "no encoder checkpoint: pass --encoder, set neural.encoder, or point {} at one",
                lesbar_neural::ENCODER_ENV
            ))
        },
    )?;
    if !lesbar_neural::is_encoder_dir(&dir) {
        return Err(CliError::validation(format!(
            "{} is not an encoder checkpoint (need config.json, vocab.txt, model.safetensors)",
            dir.display()
        )));
    }
    Ok(dir)
}

/// Train the configured neural mode and save its artifact into `dir`.
/// Returns the final training loss.
#[cfg(feature = "neural")]
pub(crate) fn train_neural_core(
    corpus: &Corpus,
    corpus_path: &Path,
    config: &RunConfig,
    dir: &Path,
) -> Result<f64, CliError> {
    use crate::config::NeuralModeName;

    let encoder_dir = resolve_encoder(config)?;
    ensure_dir(dir)?;
    let stage = |e: lesbar_neural::NeuralError| CliError::stage("train", e);
    let (model, seed) = match config.neural.mode {
        NeuralModeName::Frozen => {
            let neural_config = config.neural.frozen_config(config.seed);
            let model =
                lesbar_neural::train_frozen(&encoder_dir, corpus, &neural_config).map_err(stage)?;
            (model, neural_config.seed)
        }
        NeuralModeName::FineTuned => {
            let neural_config = config.neural.fine_tune_config(config.seed);
            let model = lesbar_neural::train_finetune(&encoder_dir, corpus, &neural_config)
                .map_err(stage)?;
            (model, neural_config.seed)
        }
    };
    let manifest = Provenance::new("train-neural")
        .with_seed(seed)
        .with_input_file("corpus", corpus_path)
        .map_err(CliError::runtime)?
        .with_input_digest("encoder", model.encoder_digest())
        .with_config(config)
        .map_err(CliError::runtime)?;
    model.save(dir, &manifest).map_err(stage)?;
    config.echo(dir)?;
    Ok(model.train_log().train_loss.last().copied().unwrap_or(f64::NAN))
}

#[cfg(not(feature = "neural"))]
pub(crate) fn train_neural_core(
    _corpus: &Corpus,
    _corpus_path: &Path,
    _config: &RunConfig,
    _dir: &Path,
) -> Result<f64, CliError> {
    Err(no_neural_support())
}

#[cfg(not(feature = "neural"))]
pub(crate) fn no_neural_support() -> CliError {
    CliError::validation(
        "this build has no neural support; reinstall with the `neural` feature to train \
         frozen or fine-tuned models",
    )
}

pub fn predict(args: PredictArgs, config: RunConfig) -> Result<(), CliError> {
    config.validate()?;
    let model = LoadedModel::load(&args.model)?;
    if let Some(text) = &args.text {
        let sentence = Sentence {
            id: "cli-text".to_string(),
            text: text.clone(),
            source: String::new(),
            experiment_id: None,
        };
        let scores = model
            .predictor()
            .predict(&[sentence])
            .map_err(|e| CliError::stage("predict", e))?;
        println!("{}", scores[0]);
        return Ok(());
    }

    let input = args.input.as_deref().expect("clap enforces text xor input");
    let sentences = read_plain_sentences(input)?;
    let scores = model
        .predictor()
        .predict(&sentences)
        .map_err(|e| CliError::stage("predict", e))?;
    for (sentence, score) in sentences.iter().zip(&scores) {
        println!("{}\t{}", sentence.id, score);
    }

    if let Some(out) = &args.out {
        ensure_dir(out)?;
        write_predictions(out, &sentences, &scores)?;
        let manifest = Provenance::new("predict")
            .with_input_file("input", input)
            .map_err(CliError::runtime)?
            .with_input_file("model", args.model.join(marker_file(&model)))
            .map_err(CliError::runtime)?
            .with_config(&config)
            .map_err(CliError::runtime)?;
        finish_stage(out, &config, &manifest)?;
    }
    Ok(())
}

/// One sentence per non-empty line; ids are 1-based line numbers.
fn read_plain_sentences(path: &Path) -> Result<Vec<Sentence>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    let sentences: Vec<Sentence> = text
        .lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| Sentence {
            id: (i + 1).to_string(),
            text: line.trim().to_string(),
            source: String::new(),
            experiment_id: None,
        })
        .collect();
    if sentences.is_empty() {
        return Err(CliError::validation(format!(
            "{} contains no sentences",
            path.display()
        )));
    }
    Ok(sentences)
}

fn write_predictions(dir: &Path, sentences: &[Sentence], scores: &[f64]) -> Result<(), CliError> {
    let path = dir.join(PREDICTIONS_FILE);
    let err = |e: csv::Error| CliError::runtime(format!("cannot write {}: {e}", path.display()));
    let mut writer = csv::Writer::from_path(&path)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
    writer.write_record(["sentence_id", "score"]).map_err(err)?;
    for (sentence, score) in sentences.iter().zip(scores) {
        writer
            .write_record([sentence.id.as_str(), &score.to_string()])
            .map_err(err)?;
    }
    writer
        .flush()
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))
}

pub(crate) fn marker_file(model: &LoadedModel) -> &'static str {
    match model {
        LoadedModel::Forest(_) => lesbar_core::baseline::MODEL_FILE,
        #[cfg(feature = "neural")]
        LoadedModel::Neural(_) => lesbar_neural::NEURAL_MODEL_FILE,
    }
}

pub fn importance(args: ImportanceArgs, config: RunConfig) -> Result<(), CliError> {
    config.validate()?;
    let model = LoadedModel::load(&args.model)?;
    let forest = match &model {
        LoadedModel::Forest(forest) => forest,
        #[cfg(feature = "neural")]
        LoadedModel::Neural(_) => {
            return Err(CliError::validation(
                "feature importances need a forest artifact; neural models have none",
            ))
        }
    };
    let mut importances = forest.importances();
    importances.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let lines: Vec<String> = importances
        .iter()
        .map(|(name, value)| format!("{name}\t{value}"))
        .collect();
    for line in &lines {
        println!("{line}");
    }

    if let Some(out) = &args.out {
        ensure_dir(out)?;
        let path = out.join(IMPORTANCE_FILE);
        std::fs::write(&path, lines.join("\n") + "\n")
            .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
        let manifest = Provenance::new("importance")
            .with_input_file("model", args.model.join(lesbar_core::baseline::MODEL_FILE))
            .map_err(CliError::runtime)?
            .with_config(&config)
            .map_err(CliError::runtime)?;
        finish_stage(out, &config, &manifest)?;
    }
    Ok(())
}
