//! Command-line surface. Every flag maps onto a run-config key; the help
//! text of a flag names any key it does not share a name with.

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::config::NeuralModeName;

#[derive(Debug, Parser)]
#[command(
    name = "lesbar",
    version,
    about = "Sentence-level German readability assessment",
    propagate_version = true
)]
pub struct Cli {
    /// TOML run configuration; flags override its keys.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inspect or split labeled corpora.
    #[command(subcommand)]
    Corpus(CorpusCommand),
    /// Cleanse, aggregate and rescale raw ratings.
    #[command(subcommand)]
    Ratings(RatingsCommand),
    /// Extract or select linguistic features.
    #[command(subcommand)]
    Features(FeaturesCommand),
    /// Train a model on a labeled corpus.
    Train(TrainArgs),
    /// Score sentences with a trained model.
    Predict(PredictArgs),
    /// Print a trained forest's feature importances.
    Importance(ImportanceArgs),
    /// Evaluate a trained model on a labeled corpus.
    Evaluate(EvaluateArgs),
    /// Merge evaluation reports into one comparison table.
    Compare(CompareArgs),
    /// Run the full pipeline: stats, split, train, evaluate, compare.
    Run(RunArgs),
}

#[derive(Debug, Subcommand)]
pub enum CorpusCommand {
    /// Summarize a corpus: size, MOS and sentence-length distributions.
    Stats(CorpusStatsArgs),
    /// Split a corpus into disjoint train and test files.
    Split(CorpusSplitArgs),
}

#[derive(Debug, Args)]
pub struct CorpusStatsArgs {
    /// Labeled corpus file.
    #[arg(long, value_name = "FILE")]
    pub corpus: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Length histogram bin width in characters (stats.length_bin).
    #[arg(long, value_name = "CHARS")]
    pub length_bin: Option<u32>,
    /// MOS histogram bin width (stats.mos_bin).
    #[arg(long, value_name = "WIDTH")]
    pub mos_bin: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CorpusSplitArgs {
    /// Labeled corpus file.
    #[arg(long, value_name = "FILE")]
    pub corpus: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Fraction of sentences in the train part (split.train_fraction).
    #[arg(long, value_name = "FRACTION")]
    pub train_fraction: Option<f64>,
    /// Split seed (split.seed).
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum RatingsCommand {
    /// Filter raw rating submissions by the cleansing rules.
    Clean(RatingsCleanArgs),
    /// Aggregate submissions into per-sentence MOS records.
    Aggregate(RatingsAggregateArgs),
    /// Fit a linear scale mapping against reference records and apply it.
    Map(RatingsMapArgs),
}

#[derive(Debug, Args)]
pub struct RatingsCleanArgs {
    /// Raw submissions file.
    #[arg(long, value_name = "FILE")]
    pub submissions: PathBuf,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Minimum session duration in seconds (cleaning.min_duration_seconds).
    #[arg(long, value_name = "SECONDS")]
    pub min_duration: Option<f64>,
    /// Minimum rating variance per session (cleaning.min_variance).
    #[arg(long, value_name = "VARIANCE")]
    pub min_variance: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RatingsAggregateArgs {
    /// Cleaned submissions file.
    #[arg(long, value_name = "FILE")]
    pub submissions: PathBuf,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RatingsMapArgs {
    /// MOS records to rescale.
    #[arg(long, value_name = "FILE")]
    pub records: PathBuf,
    /// MOS records on the target scale; shared sentence ids anchor the fit.
    #[arg(long, value_name = "FILE")]
    pub reference: PathBuf,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum FeaturesCommand {
    /// Extract the full feature matrix from a corpus.
    Extract(FeaturesExtractArgs),
    /// Run missing-value, correlation and elimination filters over a matrix.
    Select(FeaturesSelectArgs),
}

#[derive(Debug, Args)]
pub struct FeaturesExtractArgs {
    /// Labeled corpus file.
    #[arg(long, value_name = "FILE")]
    pub corpus: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FeaturesSelectArgs {
    /// Labeled corpus file providing the selection targets.
    #[arg(long, value_name = "FILE")]
    pub corpus: Option<PathBuf>,
    /// Matrix from `features extract`; extracted on the fly when absent.
    #[arg(long, value_name = "FILE")]
    pub features: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Elimination target size (baseline.selection.k).
    #[arg(long, value_name = "N")]
    pub k: Option<usize>,
}

/// Which model a `train` invocation produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Forest,
    Frozen,
    FineTuned,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Which model to train.
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// Labeled training corpus file.
    #[arg(long, value_name = "FILE")]
    pub corpus: Option<PathBuf>,
    /// Output directory; becomes the model artifact.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Encoder checkpoint directory, neural models only (neural.encoder).
    #[arg(long, value_name = "DIR")]
    pub encoder: Option<PathBuf>,
    /// Reseed training: both forest seeds for --model forest, neural.seed
    /// otherwise.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Trees in the baseline forest (baseline.forest.n_trees).
    #[arg(long, value_name = "N")]
    pub trees: Option<usize>,
    /// Neural learning rate (neural.learning_rate).
    #[arg(long, value_name = "RATE")]
    pub learning_rate: Option<f64>,
    /// Neural batch size (neural.batch_size).
    #[arg(long, value_name = "N")]
    pub batch_size: Option<usize>,
    /// Neural training epochs (neural.epochs).
    #[arg(long, value_name = "N")]
    pub epochs: Option<usize>,
}

#[derive(Debug, Args)]
#[command(group = ArgGroup::new("source").required(true).args(["text", "input"]))]
pub struct PredictArgs {
    /// Trained model artifact directory.
    #[arg(long, value_name = "DIR")]
    pub model: PathBuf,
    /// One sentence to score; the score prints alone on stdout.
    #[arg(long, value_name = "TEXT")]
    pub text: Option<String>,
    /// Corpus file to score; prints one "id<TAB>score" line per sentence.
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Directory for predictions.csv; only meaningful with --input.
    #[arg(long, value_name = "DIR", requires = "input")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ImportanceArgs {
    /// Trained forest artifact directory.
    #[arg(long, value_name = "DIR")]
    pub model: PathBuf,
    /// Directory for importance.tsv; stdout only when absent.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Trained model artifact directory.
    #[arg(long, value_name = "DIR")]
    pub model: PathBuf,
    /// Labeled evaluation corpus file.
    #[arg(long, value_name = "FILE")]
    pub corpus: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Prediction histogram bin width (evaluation.prediction_bin_width).
    #[arg(long, value_name = "WIDTH")]
    pub bin_width: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Evaluation report JSON files, one table row each.
    #[arg(value_name = "REPORT", num_args = 1.., required = true)]
    pub reports: Vec<PathBuf>,
    /// Directory for compare.md; stdout only when absent.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Labeled corpus file.
    #[arg(long, value_name = "FILE")]
    pub corpus: Option<PathBuf>,
    /// Output directory; one subdirectory per stage.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Master seed (seed).
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Also train and evaluate a neural model (neural.train).
    #[arg(long)]
    pub neural: bool,
    /// Neural mode (neural.mode).
    #[arg(long, value_enum, value_name = "MODE")]
    pub neural_mode: Option<NeuralModeName>,
    /// Encoder checkpoint directory (neural.encoder).
    #[arg(long, value_name = "DIR")]
    pub encoder: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_tree_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn predict_requires_exactly_one_source() {
        use clap::Parser;
        assert!(Cli::try_parse_from(["lesbar", "predict", "--model", "m"]).is_err());
        assert!(Cli::try_parse_from([
            "lesbar", "predict", "--model", "m", "--text", "a", "--input", "b"
        ])
        .is_err());
        assert!(Cli::try_parse_from(["lesbar", "predict", "--model", "m", "--text", "a"]).is_ok());
    }
}
