//! Command-line pipeline for sentence-level German readability assessment.
//!
//! The binary front end over the core toolkit: corpus handling, rating
//! cleansing, feature work, model training, scoring and evaluation, plus a
//! `run` command chaining the whole pipeline. Exit codes are part of the
//! contract: 0 success, 1 validation failure (bad flags, config or inputs),
//! 2 runtime failure (a stage failed on valid inputs).

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod stage;

use args::{Cli, Command, CorpusCommand, FeaturesCommand, RatingsCommand};
use config::RunConfig;
use error::{CliError, EXIT_VALIDATION};

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let config = RunConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Corpus(CorpusCommand::Stats(args)) => commands::corpus::stats(args, config),
        Command::Corpus(CorpusCommand::Split(args)) => commands::corpus::split(args, config),
        Command::Ratings(RatingsCommand::Clean(args)) => commands::ratings::clean(args, config),
        Command::Ratings(RatingsCommand::Aggregate(args)) => {
            commands::ratings::aggregate(args, config)
        }
        Command::Ratings(RatingsCommand::Map(args)) => commands::ratings::map(args, config),
        Command::Features(FeaturesCommand::Extract(args)) => {
            commands::features::extract(args, config)
        }
        Command::Features(FeaturesCommand::Select(args)) => {
            commands::features::select(args, config)
        }
        Command::Train(args) => commands::model::train(args, config),
        Command::Predict(args) => commands::model::predict(args, config),
        Command::Importance(args) => commands::model::importance(args, config),
        Command::Evaluate(args) => commands::evaluate::evaluate(args, config),
        Command::Compare(args) => commands::evaluate::compare(args, config),
        Command::Run(args) => commands::run::run(args, config),
    }
}

/// Parse `argv` and run the named command, returning the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_VALIDATION,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
