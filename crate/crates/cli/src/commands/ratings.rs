//! `ratings clean`, `ratings aggregate` and `ratings map`.

use std::collections::BTreeMap;

use lesbar_core::provenance::Provenance;
use lesbar_core::ratings::{
    aggregate_mos, anchor_pairs, apply_mapping, clean_submissions, collect_ratings, fit_mapping,
    load_mos_records, load_submissions, save_mos_records, save_submissions, MosRecord,
};

use crate::args::{RatingsAggregateArgs, RatingsCleanArgs, RatingsMapArgs};
use crate::commands::corpus::write_json;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::stage::{ensure_dir, finish_stage};

pub const CLEANED_FILE: &str = "submissions.csv";
pub const CLEANING_REPORT_FILE: &str = "cleaning-report.json";
pub const MOS_FILE: &str = "mos.csv";
pub const MAPPING_FILE: &str = "mapping.json";
pub const MAPPED_FILE: &str = "mapped.csv";

pub fn clean(args: RatingsCleanArgs, mut config: RunConfig) -> Result<(), CliError> {
    if let Some(v) = args.out {
        config.out = Some(v);
    }
    if let Some(v) = args.min_duration {
        config.cleaning.min_duration_seconds = v;
    }
    if let Some(v) = args.min_variance {
        config.cleaning.min_variance = v;
    }
    config.validate()?;
    let out = config.out_dir()?.to_path_buf();
    let submissions = load_submissions(&args.submissions).map_err(CliError::validation)?;

    ensure_dir(&out)?;
    let (kept, report) = clean_submissions(&submissions, &config.cleaning);
    save_submissions(&kept, out.join(CLEANED_FILE)).map_err(|e| CliError::stage("clean", e))?;
    write_json(&out.join(CLEANING_REPORT_FILE), &report)?;
    let manifest = Provenance::new("ratings-clean")
        .with_input_file("submissions", &args.submissions)
        .map_err(CliError::runtime)?
        .with_config(&config)
        .map_err(CliError::runtime)?;
    finish_stage(&out, &config, &manifest)?;
    println!(
        "kept {} of {} submissions ({} removed by rule, {} malformed) -> {}",
        report.kept,
        report.total,
        report.removed_union,
        report.malformed.len(),
        out.display()
    );
    Ok(())
}

pub fn aggregate(args: RatingsAggregateArgs, mut config: RunConfig) -> Result<(), CliError> {
    if let Some(v) = args.out {
        config.out = Some(v);
    }
    config.validate()?;
    let out = config.out_dir()?.to_path_buf();
    let submissions = load_submissions(&args.submissions).map_err(CliError::validation)?;
    let ratings = collect_ratings(&submissions);
    let records = aggregate_mos(&ratings).map_err(CliError::validation)?;

    ensure_dir(&out)?;
    save_mos_records(&records, out.join(MOS_FILE)).map_err(|e| CliError::stage("aggregate", e))?;
    let manifest = Provenance::new("ratings-aggregate")
        .with_input_file("submissions", &args.submissions)
        .map_err(CliError::runtime)?
        .with_config(&config)
        .map_err(CliError::runtime)?;
    finish_stage(&out, &config, &manifest)?;
    println!(
        "aggregated {} ratings into {} sentences -> {}",
        ratings.len(),
        records.len(),
        out.display()
    );
    Ok(())
}

pub fn map(args: RatingsMapArgs, mut config: RunConfig) -> Result<(), CliError> {
    if let Some(v) = args.out {
        config.out = Some(v);
    }
    config.validate()?;
    let out = config.out_dir()?.to_path_buf();
    let records = load_mos_records(&args.records).map_err(CliError::validation)?;
    let reference = load_mos_records(&args.reference).map_err(CliError::validation)?;
    let reference_mos: BTreeMap<String, f64> = reference
        .iter()
        .map(|r| (r.sentence_id.clone(), r.mos))
        .collect();
    let anchors = anchor_pairs(&records, &reference_mos);
    let mapping = fit_mapping(&anchors).map_err(CliError::validation)?;
    let mapped: Vec<MosRecord> = apply_mapping(&mapping, &records);

    ensure_dir(&out)?;
    write_json(&out.join(MAPPING_FILE), &mapping)?;
    save_mos_records(&mapped, out.join(MAPPED_FILE)).map_err(|e| CliError::stage("map", e))?;
    let manifest = Provenance::new("ratings-map")
        .with_input_file("records", &args.records)
        .map_err(CliError::runtime)?
        .with_input_file("reference", &args.reference)
        .map_err(CliError::runtime)?
        .with_config(&config)
        .map_err(CliError::runtime)?;
    finish_stage(&out, &config, &manifest)?;
    println!(
        "fitted y = {:.4}x {:+.4} over {} anchors -> {}",
        mapping.slope,
        mapping.intercept,
        mapping.n_anchors,
        out.display()
    );
    Ok(())
}
