//! RMSE, Pearson and Spearman metrics, model evaluation over a corpus, and
//! report rendering (JSON plus a prediction-distribution plot).

use crate::corpus::{Corpus, Sentence};
use crate::histogram::Histogram;
use crate::plot;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("length mismatch: {left} predictions vs {right} targets")]
    LengthMismatch { left: usize, right: usize },
    #[error("metric undefined on empty input")]
    Empty,
    #[error("correlation needs at least 2 pairs, got {0}")]
    TooFew(usize),
    #[error("correlation undefined: {0} values are constant")]
    Constant(&'static str),
    #[error("input contains a non-finite value")]
    NonFinite,
}

fn check_pair(preds: &[f64], targets: &[f64]) -> Result<(), MetricError> {
    if preds.len() != targets.len() {
        return Err(MetricError::LengthMismatch {
            left: preds.len(),
            right: targets.len(),
        });
    }
    if preds.is_empty() {
        return Err(MetricError::Empty);
    }
    if preds.iter().chain(targets).any(|v| !v.is_finite()) {
        return Err(MetricError::NonFinite);
    }
    Ok(())
}

/// Root mean squared error: `sqrt(mean((p − t)²))`.
pub fn rmse(preds: &[f64], targets: &[f64]) -> Result<f64, MetricError> {
    check_pair(preds, targets)?;
    let sum: f64 = preds
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok((sum / preds.len() as f64).sqrt())
}

/// Pearson correlation coefficient in population form (the `n` factors
/// cancel between numerator and denominator). Constant input is an error,
/// never a silent zero.
pub fn pearson(preds: &[f64], targets: &[f64]) -> Result<f64, MetricError> {
    check_pair(preds, targets)?;
    if preds.len() < 2 {
        return Err(MetricError::TooFew(preds.len()));
    }
    let n = preds.len() as f64;
    let mean_p = preds.iter().sum::<f64>() / n;
    let mean_t = targets.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_p = 0.0;
    let mut var_t = 0.0;
    for (p, t) in preds.iter().zip(targets) {
        let dp = p - mean_p;
        let dt = t - mean_t;
        cov += dp * dt;
        var_p += dp * dp;
        var_t += dt * dt;
    }
    if var_p == 0.0 {
        return Err(MetricError::Constant("prediction"));
    }
    if var_t == 0.0 {
        return Err(MetricError::Constant("target"));
    }
    Ok((cov / (var_p.sqrt() * var_t.sqrt())).clamp(-1.0, 1.0))
}

/// Fractional ranks (1-based); tied values receive the average of the ranks
/// they span, e.g. `[1, 2, 2, 3]` → `[1, 2.5, 2.5, 4]`.
pub fn fractional_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &at in &order[i..=j] {
            ranks[at] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation: Pearson over fractional (average-tie) ranks.
pub fn spearman(preds: &[f64], targets: &[f64]) -> Result<f64, MetricError> {
    check_pair(preds, targets)?;
    if preds.len() < 2 {
        return Err(MetricError::TooFew(preds.len()));
    }
    pearson(&fractional_ranks(preds), &fractional_ranks(targets))
}

/// A prediction failure, naming the offending sentence when known.
#[derive(Debug, Clone, Error, PartialEq)]
pub struct PredictionFailure {
    pub sentence_id: Option<String>,
    pub message: String,
}

impl std::fmt::Display for PredictionFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.sentence_id {
            Some(id) => write!(f, "prediction failed for sentence `{id}`: {}", self.message),
            None => write!(f, "prediction failed: {}", self.message),
        }
    }
}

/// Anything that scores sentences. Implemented by the forest baseline and
/// the neural artifacts.
pub trait Predictor {
    fn model_id(&self) -> String;
    /// One score per input sentence, in input order.
    fn predict(&self, sentences: &[Sentence]) -> Result<Vec<f64>, PredictionFailure>;
}

/// One scored sentence inside an [`EvalReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceScore {
    pub sentence_id: String,
    pub target: f64,
    pub prediction: f64,
}

/// Evaluation result: metrics plus the per-sentence pairs they were
/// computed over and the prediction distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub model_id: String,
    pub n: usize,
    pub rmse: f64,
    pub pearson: f64,
    pub spearman: f64,
    pub records: Vec<SentenceScore>,
    pub prediction_histogram: Histogram,
}

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Default bin width for prediction-distribution histograms.
pub const DEFAULT_PREDICTION_BIN_WIDTH: f64 = 0.25;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("cannot evaluate on an empty corpus")]
    EmptyCorpus,
    #[error(transparent)]
    Prediction(#[from] PredictionFailure),
    #[error("model returned {got} predictions for {expected} sentences")]
    PredictionCount { expected: usize, got: usize },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("failed to write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to serialize report: {0}")]
    Serialize(#[from] serde_json::Error),
}

/// Score every sentence of a labeled corpus and compute all three metrics.
pub fn evaluate<P: Predictor + ?Sized>(
    model: &P,
    corpus: &Corpus,
    prediction_bin_width: f64,
) -> Result<EvalReport, EvalError> {
    if corpus.items.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    let sentences: Vec<Sentence> = corpus.items.iter().map(|l| l.sentence.clone()).collect();
    let predictions = model.predict(&sentences)?;
    if predictions.len() != sentences.len() {
        return Err(EvalError::PredictionCount {
            expected: sentences.len(),
            got: predictions.len(),
        });
    }
    let targets: Vec<f64> = corpus.items.iter().map(|l| l.mos_complexity).collect();
    let records: Vec<SentenceScore> = corpus
        .items
        .iter()
        .zip(&predictions)
        .map(|(item, &prediction)| SentenceScore {
            sentence_id: item.sentence.id.clone(),
            target: item.mos_complexity,
            prediction,
        })
        .collect();
    Ok(EvalReport {
        schema_version: REPORT_SCHEMA_VERSION,
        model_id: model.model_id(),
        n: records.len(),
        rmse: rmse(&predictions, &targets)?,
        pearson: pearson(&predictions, &targets)?,
        spearman: spearman(&predictions, &targets)?,
        prediction_histogram: Histogram::from_values(
            prediction_bin_width,
            predictions.iter().copied(),
        ),
        records,
    })
}

/// Files produced by [`render_report`]. `plot_path` is absent when plot
/// rendering failed; the failure is recorded in `warnings` instead of
/// aborting the render.
#[derive(Debug, Clone)]
pub struct RenderedReport {
    pub report_path: PathBuf,
    pub plot_path: Option<PathBuf>,
    pub warnings: Vec<String>,
}

fn sanitize_file_stem(id: &str) -> String {
    let stem: String = id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '-' })
        .collect();
    if stem.is_empty() { "model".to_string() } else { stem }
}

/// Write `<model>-report.json` and `<model>-predictions.png` into `out_dir`.
pub fn render_report(report: &EvalReport, out_dir: impl AsRef<Path>) -> Result<RenderedReport, EvalError> {
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir).map_err(|source| EvalError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let stem = sanitize_file_stem(&report.model_id);

    let report_path = out_dir.join(format!("{stem}-report.json"));
    let json = serde_json::to_vec_pretty(report)?;
    std::fs::write(&report_path, json).map_err(|source| EvalError::Io {
        path: report_path.display().to_string(),
        source,
    })?;

    let plot_path = out_dir.join(format!("{stem}-predictions.png"));
    let mut warnings = Vec::new();
    let plot_path = match plot::render_histogram_png(&report.prediction_histogram, &plot_path) {
        Ok(()) => Some(plot_path),
        Err(e) => {
            warnings.push(format!("plot rendering failed, report is text-only: {e}"));
            None
        }
    };
    Ok(RenderedReport {
        report_path,
        plot_path,
        warnings,
    })
}

/// Load a report written by [`render_report`].
pub fn load_report(path: impl AsRef<Path>) -> Result<EvalReport, EvalError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| EvalError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(serde_json::from_slice(&bytes)?)
}

/// Side-by-side metric table over several reports, one row per model,
/// numbers at 3 decimal places.
pub fn compare(reports: &[EvalReport]) -> String {
    let mut out = String::new();
    out.push_str("| model | RMSE | Pearson | Spearman | n |\n");
    out.push_str("|-------|------|---------|----------|---|\n");
    for r in reports {
        out.push_str(&format!(
            "| {} | {:.3} | {:.3} | {:.3} | {} |\n",
            r.model_id, r.rmse, r.pearson, r.spearman, r.n
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{LabeledSentence, SplitTag};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rmse_identity_is_zero() {
        let v = vec![1.0, 2.5, 7.0];
        assert_eq!(rmse(&v, &v).unwrap(), 0.0);
    }

    #[test]
    fn rmse_direct_formula() {
        let got = rmse(&[1.0, 2.0], &[1.0, 4.0]).unwrap();
        assert!((got - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rmse_symmetric_and_shift_invariant() {
        let p = vec![1.2, 3.4, 5.6, 2.0];
        let t = vec![2.0, 3.0, 5.0, 1.5];
        assert_eq!(rmse(&p, &t).unwrap(), rmse(&t, &p).unwrap());
        let shifted_p: Vec<f64> = p.iter().map(|x| x + 3.7).collect();
        let shifted_t: Vec<f64> = t.iter().map(|x| x + 3.7).collect();
        assert!((rmse(&p, &t).unwrap() - rmse(&shifted_p, &shifted_t).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn rmse_rejects_bad_input() {
        assert_eq!(
            rmse(&[1.0], &[1.0, 2.0]),
            Err(MetricError::LengthMismatch { left: 1, right: 2 })
        );
        assert_eq!(rmse(&[], &[]), Err(MetricError::Empty));
        assert_eq!(rmse(&[f64::NAN], &[1.0]), Err(MetricError::NonFinite));
    }

    #[test]
    fn pearson_affine_and_negation() {
        let t = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let p: Vec<f64> = t.iter().map(|x| 2.0 * x + 1.0).collect();
        assert!((pearson(&p, &t).unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = t.iter().map(|x| -x).collect();
        assert!((pearson(&neg, &t).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_rejects_constant_input() {
        assert_eq!(
            pearson(&[4.0, 4.0, 4.0], &[1.0, 2.0, 3.0]),
            Err(MetricError::Constant("prediction"))
        );
        assert_eq!(
            pearson(&[1.0, 2.0, 3.0], &[4.0, 4.0, 4.0]),
            Err(MetricError::Constant("target"))
        );
    }

    /// Independent oracle using the expanded-sums formulation.
    fn pearson_oracle(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let sx: f64 = x.iter().sum();
        let sy: f64 = y.iter().sum();
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        let sxx: f64 = x.iter().map(|a| a * a).sum();
        let syy: f64 = y.iter().map(|a| a * a).sum();
        (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
    }

    #[test]
    fn pearson_matches_expanded_sums_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(2..=320);
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            match pearson(&x, &y) {
                Ok(r) => assert!((r - pearson_oracle(&x, &y)).abs() < 1e-9),
                Err(MetricError::Constant(_)) => {}
                Err(e) => panic!("unexpected error: {e}"),
            }
        }
    }

    #[test]
    fn spearman_rank_invariance() {
        let t: Vec<f64> = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let p: Vec<f64> = t.iter().map(|x| x.exp()).collect();
        assert!((spearman(&p, &t).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn average_tie_ranks() {
        assert_eq!(fractional_ranks(&[1.0, 2.0, 2.0, 3.0]), vec![1.0, 2.5, 2.5, 4.0]);
        assert_eq!(fractional_ranks(&[5.0, 1.0, 5.0]), vec![2.5, 1.0, 2.5]);
    }

    #[test]
    fn spearman_matches_rank_then_pearson_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let n = rng.gen_range(3..=120);
            // Integer draws inject plenty of ties.
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=7) as f64).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=7) as f64).collect();
            let ours = match spearman(&x, &y) {
                Ok(r) => r,
                Err(MetricError::Constant(_)) => continue,
                Err(e) => panic!("unexpected error: {e}"),
            };
            let oracle = pearson_oracle(&fractional_ranks(&x), &fractional_ranks(&y));
            assert!((ours - oracle).abs() < 1e-9);
        }
    }

    fn labeled(id: &str, mos: f64) -> LabeledSentence {
        LabeledSentence {
            sentence: Sentence {
                id: id.to_string(),
                text: format!("Satz {id}."),
                source: "art".to_string(),
                experiment_id: None,
            },
            mos_complexity: mos,
            mos_understandability: None,
            mos_lexical: None,
            n_ratings: 16,
        }
    }

    fn toy_corpus() -> Corpus {
        Corpus {
            name: "toy".to_string(),
            items: vec![
                labeled("a", 1.5),
                labeled("b", 3.0),
                labeled("c", 4.5),
                labeled("d", 6.0),
            ],
            split_tag: SplitTag::Unsplit,
        }
    }

    struct OracleModel;
    impl Predictor for OracleModel {
        fn model_id(&self) -> String {
            "oracle".to_string()
        }
        fn predict(&self, sentences: &[Sentence]) -> Result<Vec<f64>, PredictionFailure> {
            // Recovers the target encoded by toy_corpus ids.
            Ok(sentences
                .iter()
                .map(|s| match s.id.as_str() {
                    "a" => 1.5,
                    "b" => 3.0,
                    "c" => 4.5,
                    _ => 6.0,
                })
                .collect())
        }
    }

    #[test]
    fn perfect_model_scores_zero_one_one() {
        let report = evaluate(&OracleModel, &toy_corpus(), 0.5).unwrap();
        assert_eq!(report.rmse, 0.0);
        assert!((report.pearson - 1.0).abs() < 1e-12);
        assert!((report.spearman - 1.0).abs() < 1e-12);
        assert_eq!(report.n, 4);
        assert_eq!(report.records.len(), 4);
        assert_eq!(report.prediction_histogram.total, 4);
    }

    struct FailingModel;
    impl Predictor for FailingModel {
        fn model_id(&self) -> String {
            "failing".to_string()
        }
        fn predict(&self, sentences: &[Sentence]) -> Result<Vec<f64>, PredictionFailure> {
            Err(PredictionFailure {
                sentence_id: Some(sentences[0].id.clone()),
                message: "no features".to_string(),
            })
        }
    }

    #[test]
    fn prediction_failure_names_sentence() {
        let err = evaluate(&FailingModel, &toy_corpus(), 0.5).unwrap_err();
        assert!(err.to_string().contains("`a`"));
    }

    #[test]
    fn render_writes_json_and_png() {
        let report = evaluate(&OracleModel, &toy_corpus(), 0.5).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let rendered = render_report(&report, dir.path()).unwrap();
        assert!(rendered.report_path.exists());
        assert!(rendered.plot_path.as_ref().unwrap().exists());
        assert!(rendered.warnings.is_empty());
        let loaded = load_report(&rendered.report_path).unwrap();
        assert_eq!(loaded, report);
    }

    #[test]
    fn compare_prints_three_decimals() {
        let mut report = evaluate(&OracleModel, &toy_corpus(), 0.5).unwrap();
        report.rmse = 0.8131;
        report.pearson = 0.5506;
        report.spearman = 0.5814;
        let table = compare(&[report]);
        assert!(table.contains("| oracle | 0.813 | 0.551 | 0.581 | 4 |"));
    }
}
