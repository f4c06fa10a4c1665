//! `corpus stats` and `corpus split`.

use std::fs;
use std::path::{Path, PathBuf};

use lesbar_core::corpus::{length_histogram, mos_histogram, save_corpus, split_corpus, Corpus};
use lesbar_core::plot::render_histogram_png;
use lesbar_core::provenance::Provenance;
use lesbar_core::Histogram;
use serde::Serialize;

use crate::args::{CorpusSplitArgs, CorpusStatsArgs};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::stage::{ensure_dir, finish_stage, read_corpus};

pub const STATS_FILE: &str = "stats.json";
pub const LENGTH_PLOT_FILE: &str = "length-histogram.png";
pub const MOS_PLOT_FILE: &str = "mos-histogram.png";
pub const TRAIN_FILE: &str = "train.csv";
pub const TEST_FILE: &str = "test.csv";

#[derive(Debug, Serialize)]
pub struct CorpusStats {
    pub name: String,
    pub n: usize,
    pub mos_mean: f64,
    pub mos_min: f64,
    pub mos_max: f64,
    pub mean_length_chars: f64,
    pub length_histogram: Histogram,
    pub mos_histogram: Histogram,
}

pub fn stats(args: CorpusStatsArgs, mut config: RunConfig) -> Result<(), CliError> {
    if let Some(v) = args.corpus {
        config.corpus = Some(v);
    }
    if let Some(v) = args.out {
        config.out = Some(v);
    }
    if let Some(v) = args.length_bin {
        config.stats.length_bin = v;
    }
    if let Some(v) = args.mos_bin {
        config.stats.mos_bin = v;
    }
    config.validate()?;
    let corpus_path = config.corpus_path()?.to_path_buf();
    let out = config.out_dir()?.to_path_buf();
    let corpus = read_corpus(&corpus_path, &config)?;

    let summary = stats_core(&corpus, &corpus_path, &config, &out)?;
    println!(
        "{}: {} sentences, MOS {:.2}..{:.2} (mean {:.2}) -> {}",
        summary.name,
        summary.n,
        summary.mos_min,
        summary.mos_max,
        summary.mos_mean,
        out.display()
    );
    Ok(())
}

/// Write `stats.json`, both histogram plots, the config echo and the
/// manifest into `dir`.
pub(crate) fn stats_core(
    corpus: &Corpus,
    corpus_path: &Path,
    config: &RunConfig,
    dir: &Path,
) -> Result<CorpusStats, CliError> {
    ensure_dir(dir)?;
    let mos = corpus.mos_values();
    let n = corpus.len();
    let mean_length_chars = corpus
        .items
        .iter()
        .map(|item| item.sentence.text.chars().count() as f64)
        .sum::<f64>()
        / n as f64;
    let summary = CorpusStats {
        name: corpus.name.clone(),
        n,
        mos_mean: mos.iter().sum::<f64>() / n as f64,
        mos_min: mos.iter().copied().fold(f64::INFINITY, f64::min),
        mos_max: mos.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean_length_chars,
        length_histogram: length_histogram(corpus, config.stats.length_bin),
        mos_histogram: mos_histogram(corpus, config.stats.mos_bin),
    };
    write_json(&dir.join(STATS_FILE), &summary)?;
    for (hist, file) in [
        (&summary.length_histogram, LENGTH_PLOT_FILE),
        (&summary.mos_histogram, MOS_PLOT_FILE),
    ] {
        if let Err(e) = render_histogram_png(hist, dir.join(file)) {
            eprintln!("warning: could not render {file}: {e}");
        }
    }
    let manifest = Provenance::new("corpus-stats")
        .with_input_file("corpus", corpus_path)
        .map_err(CliError::runtime)?
        .with_config(config)
        .map_err(CliError::runtime)?;
    finish_stage(dir, config, &manifest)?;
    Ok(summary)
}

pub fn split(args: CorpusSplitArgs, mut config: RunConfig) -> Result<(), CliError> {
    if let Some(v) = args.corpus {
        config.corpus = Some(v);
    }
    if let Some(v) = args.out {
        config.out = Some(v);
    }
    if let Some(v) = args.train_fraction {
        config.split.train_fraction = v;
    }
    if let Some(v) = args.seed {
        config.split.seed = Some(v);
    }
    config.validate()?;
    let corpus_path = config.corpus_path()?.to_path_buf();
    let out = config.out_dir()?.to_path_buf();
    let corpus = read_corpus(&corpus_path, &config)?;

    let (train_path, test_path) = split_core(&corpus, &corpus_path, &config, &out)?;
    println!(
        "split {} sentences -> {} and {}",
        corpus.len(),
        train_path.display(),
        test_path.display()
    );
    Ok(())
}

/// Write `train.csv` and `test.csv` plus the stage paper trail into `dir`.
pub(crate) fn split_core(
    corpus: &Corpus,
    corpus_path: &Path,
    config: &RunConfig,
    dir: &Path,
) -> Result<(PathBuf, PathBuf), CliError> {
    ensure_dir(dir)?;
    let seed = config.split_seed();
    let (train, test) = split_corpus(corpus, config.split.train_fraction, seed)
        .map_err(CliError::validation)?;
    let train_path = dir.join(TRAIN_FILE);
    let test_path = dir.join(TEST_FILE);
    save_corpus(&train, &train_path, &config.schema).map_err(|e| CliError::stage("split", e))?;
    save_corpus(&test, &test_path, &config.schema).map_err(|e| CliError::stage("split", e))?;
    let manifest = Provenance::new("corpus-split")
        .with_seed(seed)
        .with_input_file("corpus", corpus_path)
        .map_err(CliError::runtime)?
        .with_config(config)
        .map_err(CliError::runtime)?;
    finish_stage(dir, config, &manifest)?;
    Ok((train_path, test_path))
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut json = serde_json::to_vec_pretty(value)
        .map_err(|e| CliError::runtime(format!("cannot serialize {}: {e}", path.display())))?;
    json.push(b'\n');
    fs::write(path, json)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))
}
