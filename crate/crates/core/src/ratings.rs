//! Raw rater submissions: cleansing rules, per-sentence MOS aggregation, and
//! the first-order mapping that aligns MOS scales between experiments.
//!
//! A session rates eleven sentences, one of which is a gold question with a
//! known answer. Cleansing removes submissions that fail the gold question,
//! failed the language test, show a click pattern (small rating variance), or
//! finished too fast. All operations are pure functions over immutable
//! inputs.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

/// Rated items per session, one of them the gold question.
pub const ITEMS_PER_SESSION: usize = 11;

/// One rated sentence within a session. `gold_expected` is set only on the
/// session's gold question and carries the known correct answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatedItem {
    pub sentence_id: String,
    pub rating: u8,
    pub gold_expected: Option<u8>,
}

/// One rater session: eleven rated items plus the session-level evidence the
/// cleansing rules consume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingSubmission {
    pub rater_id: String,
    pub session_id: String,
    pub items: Vec<RatedItem>,
    pub language_test_passed: bool,
    pub duration_seconds: f64,
}

impl RatingSubmission {
    /// The gold item, if the session has exactly one.
    pub fn gold_item(&self) -> Option<&RatedItem> {
        let mut golds = self.items.iter().filter(|i| i.gold_expected.is_some());
        match (golds.next(), golds.next()) {
            (Some(g), None) => Some(g),
            _ => None,
        }
    }

    /// Ratings excluding the gold question, as (sentence_id, rating) pairs.
    pub fn non_gold_ratings(&self) -> impl Iterator<Item = (&str, u8)> {
        self.items
            .iter()
            .filter(|i| i.gold_expected.is_none())
            .map(|i| (i.sentence_id.as_str(), i.rating))
    }

    /// Structural validity check; `Err` carries the malformation reason.
    pub fn check_well_formed(&self) -> Result<(), String> {
        if self.items.len() != ITEMS_PER_SESSION {
            return Err(format!(
                "expected {ITEMS_PER_SESSION} rated items, found {}",
                self.items.len()
            ));
        }
        let n_gold = self.items.iter().filter(|i| i.gold_expected.is_some()).count();
        if n_gold != 1 {
            return Err(format!("expected exactly 1 gold item, found {n_gold}"));
        }
        for item in &self.items {
            if !(1..=7).contains(&item.rating) {
                return Err(format!(
                    "rating {} for `{}` outside 1–7",
                    item.rating, item.sentence_id
                ));
            }
            if let Some(exp) = item.gold_expected {
                if !(1..=7).contains(&exp) {
                    return Err(format!("gold expected answer {exp} outside 1–7"));
                }
            }
        }
        if !(self.duration_seconds.is_finite() && self.duration_seconds >= 0.0) {
            return Err(format!("invalid duration {}", self.duration_seconds));
        }
        Ok(())
    }
}

/// Thresholds for the two cleansing rules the source material leaves open.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CleaningConfig {
    /// Sessions faster than this are removed. Default: five seconds per item.
    pub min_duration_seconds: f64,
    /// Sessions whose non-gold ratings have population variance below this
    /// are treated as click patterns and removed.
    pub min_variance: f64,
}

impl Default for CleaningConfig {
    fn default() -> Self {
        CleaningConfig {
            min_duration_seconds: ITEMS_PER_SESSION as f64 * 5.0,
            min_variance: 0.5,
        }
    }
}

/// A structurally invalid submission and why it was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MalformedSubmission {
    pub session_id: String,
    pub reason: String,
}

/// Counts from one cleansing pass.
///
/// A submission failing several rules is counted once per rule, so the
/// per-rule counts can sum to more than `removed_union`, the number of
/// distinct well-formed submissions removed. Always:
/// `kept + removed_union + malformed.len() == total`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleaningReport {
    pub total: usize,
    pub removed_gold: usize,
    pub removed_language_test: usize,
    pub removed_click_pattern: usize,
    pub removed_too_fast: usize,
    /// Distinct well-formed submissions failing at least one rule.
    pub removed_union: usize,
    pub kept: usize,
    pub malformed: Vec<MalformedSubmission>,
}

/// Apply the four cleansing rules, returning the surviving submissions in
/// input order plus per-rule counts.
///
/// Each submission is judged independently, so the kept set and all counts
/// are invariant under permutation of the input.
pub fn clean_submissions(
    submissions: &[RatingSubmission],
    config: &CleaningConfig,
) -> (Vec<RatingSubmission>, CleaningReport) {
    let mut report = CleaningReport {
        total: submissions.len(),
        removed_gold: 0,
        removed_language_test: 0,
        removed_click_pattern: 0,
        removed_too_fast: 0,
        removed_union: 0,
        kept: 0,
        malformed: Vec::new(),
    };
    let mut kept = Vec::new();

    for sub in submissions {
        if let Err(reason) = sub.check_well_formed() {
            report.malformed.push(MalformedSubmission {
                session_id: sub.session_id.clone(),
                reason,
            });
            continue;
        }
        let gold = sub.gold_item().expect("well-formed submission has one gold item");

        let mut failed = false;
        if gold.rating != gold.gold_expected.expect("gold item carries expected answer") {
            report.removed_gold += 1;
            failed = true;
        }
        if !sub.language_test_passed {
            report.removed_language_test += 1;
            failed = true;
        }
        let ratings: Vec<f64> = sub.non_gold_ratings().map(|(_, r)| r as f64).collect();
        if population_variance(&ratings) < config.min_variance {
            report.removed_click_pattern += 1;
            failed = true;
        }
        if sub.duration_seconds < config.min_duration_seconds {
            report.removed_too_fast += 1;
            failed = true;
        }

        if failed {
            report.removed_union += 1;
        } else {
            kept.push(sub.clone());
        }
    }
    report.kept = kept.len();
    (kept, report)
}

fn population_variance(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// Per-sentence aggregate of all ratings given to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MosRecord {
    pub sentence_id: String,
    /// Arithmetic mean of the contributing ratings. In `[1, 7]` as
    /// aggregated; may leave that range after scale mapping.
    pub mos: f64,
    pub n_ratings: u32,
    /// Population standard deviation of the contributing ratings.
    pub std_dev: f64,
}

#[derive(Debug, Error)]
pub enum RatingsError {
    #[error("no ratings to aggregate")]
    EmptyInput,
    #[error("need at least 2 anchor pairs to fit a mapping, got {0}")]
    TooFewAnchors(usize),
    #[error("anchor x values are constant; the first-order fit is degenerate")]
    DegenerateFit,
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed delimited text in {path}: {message}")]
    Format { path: String, message: String },
}

/// Mean-opinion-score aggregation: one record per distinct sentence id,
/// ordered by id.
pub fn aggregate_mos(ratings: &[(String, u8)]) -> Result<Vec<MosRecord>, RatingsError> {
    if ratings.is_empty() {
        return Err(RatingsError::EmptyInput);
    }
    let mut groups: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for (id, rating) in ratings {
        groups.entry(id.as_str()).or_default().push(*rating as f64);
    }
    Ok(groups
        .into_iter()
        .map(|(id, values)| {
            let mos = values.iter().sum::<f64>() / values.len() as f64;
            MosRecord {
                sentence_id: id.to_string(),
                mos,
                n_ratings: values.len() as u32,
                std_dev: population_variance(&values).sqrt(),
            }
        })
        .collect())
}

/// Pull all non-gold (sentence, rating) pairs out of a set of submissions,
/// in submission order. Feed the result to [`aggregate_mos`].
pub fn collect_ratings(submissions: &[RatingSubmission]) -> Vec<(String, u8)> {
    submissions
        .iter()
        .flat_map(|s| {
            s.non_gold_ratings()
                .map(|(id, r)| (id.to_string(), r))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// First-order (affine) MOS scale mapping `y = slope · x + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingFunction {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean squared residual of the fit; zero for mappings constructed
    /// directly from coefficients.
    pub fit_residual: f64,
    pub n_anchors: u32,
}

impl MappingFunction {
    pub fn identity() -> Self {
        Self::from_coefficients(1.0, 0.0)
    }

    pub fn from_coefficients(slope: f64, intercept: f64) -> Self {
        MappingFunction {
            slope,
            intercept,
            fit_residual: 0.0,
            n_anchors: 2,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }

    /// The mapping `x ↦ outer(self(x))`. Residuals do not compose; the
    /// result carries a zero residual and the smaller anchor count.
    pub fn then(&self, outer: &MappingFunction) -> MappingFunction {
        MappingFunction {
            slope: outer.slope * self.slope,
            intercept: outer.slope * self.intercept + outer.intercept,
            fit_residual: 0.0,
            n_anchors: self.n_anchors.min(outer.n_anchors),
        }
    }
}

/// Ordinary least squares fit of `y = a·x + b` over anchor pairs.
///
/// Anchors are the sentences shared between an experiment (x) and the
/// reference dataset (y). Exactly collinear anchors recover the line to
/// machine precision.
pub fn fit_mapping(anchors: &[(f64, f64)]) -> Result<MappingFunction, RatingsError> {
    if anchors.len() < 2 {
        return Err(RatingsError::TooFewAnchors(anchors.len()));
    }
    let n = anchors.len() as f64;
    let mean_x = anchors.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = anchors.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = anchors.iter().map(|(x, _)| (x - mean_x) * (x - mean_x)).sum();
    if sxx == 0.0 {
        return Err(RatingsError::DegenerateFit);
    }
    let sxy: f64 = anchors.iter().map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let mse = anchors
        .iter()
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum::<f64>()
        / n;
    Ok(MappingFunction {
        slope,
        intercept,
        fit_residual: mse.sqrt(),
        n_anchors: anchors.len() as u32,
    })
}

/// Map every record onto the reference scale. Standard deviations scale by
/// `|slope|`; values are deliberately not clamped to `[1, 7]`.
pub fn apply_mapping(mapping: &MappingFunction, records: &[MosRecord]) -> Vec<MosRecord> {
    records
        .iter()
        .map(|r| MosRecord {
            sentence_id: r.sentence_id.clone(),
            mos: mapping.eval(r.mos),
            n_ratings: r.n_ratings,
            std_dev: mapping.slope.abs() * r.std_dev,
        })
        .collect()
}

/// Join aggregated records against reference MOS values on sentence id and
/// return the anchor pairs `(experiment MOS, reference MOS)` in id order.
pub fn anchor_pairs(records: &[MosRecord], reference: &BTreeMap<String, f64>) -> Vec<(f64, f64)> {
    let mut pairs: Vec<(&str, f64, f64)> = records
        .iter()
        .filter_map(|r| {
            reference
                .get(&r.sentence_id)
                .map(|&y| (r.sentence_id.as_str(), r.mos, y))
        })
        .collect();
    pairs.sort_by(|a, b| a.0.cmp(b.0));
    pairs.into_iter().map(|(_, x, y)| (x, y)).collect()
}

// --- file formats ------------------------------------------------------

/// Submission file columns: one row per (session, sentence) rating.
const SUBMISSION_HEADER: [&str; 8] = [
    "session_id",
    "rater_id",
    "sentence_id",
    "rating",
    "is_gold",
    "expected_answer",
    "language_test_passed",
    "duration_seconds",
];

/// Load rater submissions from delimited text.
///
/// Rows are grouped into sessions by `session_id` in order of first
/// appearance. Structural problems (wrong item counts, missing gold) are
/// left for [`clean_submissions`] to report; only unparseable cells fail the
/// load.
pub fn load_submissions(path: impl AsRef<Path>) -> Result<Vec<RatingSubmission>, RatingsError> {
    let path = path.as_ref();
    let path_str = path.display().to_string();
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => RatingsError::Io {
            path: path_str.clone(),
            source: io,
        },
        kind => RatingsError::Format {
            path: path_str.clone(),
            message: format!("{kind:?}"),
        },
    })?;
    let headers = reader.headers().map_err(|e| RatingsError::Format {
        path: path_str.clone(),
        message: e.to_string(),
    })?;
    let mut idx = [0usize; 8];
    for (slot, name) in SUBMISSION_HEADER.iter().enumerate() {
        idx[slot] = headers
            .iter()
            .position(|h| h == *name)
            .ok_or_else(|| RatingsError::Format {
                path: path_str.clone(),
                message: format!("missing required column `{name}`"),
            })?;
    }

    let mut order: Vec<String> = Vec::new();
    let mut sessions: BTreeMap<String, RatingSubmission> = BTreeMap::new();
    for (row_no, record) in reader.records().enumerate() {
        let record = record.map_err(|e| RatingsError::Format {
            path: path_str.clone(),
            message: format!("row {}: {e}", row_no + 1),
        })?;
        let field = |slot: usize| record.get(idx[slot]).unwrap_or("").trim();
        let parse_err = |what: &str, raw: &str| RatingsError::Format {
            path: path_str.clone(),
            message: format!("row {}: invalid {what} `{raw}`", row_no + 1),
        };

        let session_id = field(0).to_string();
        let rating: u8 = field(3).parse().map_err(|_| parse_err("rating", field(3)))?;
        let is_gold = parse_bool(field(4)).ok_or_else(|| parse_err("is_gold", field(4)))?;
        let gold_expected = if is_gold {
            Some(
                field(5)
                    .parse::<u8>()
                    .map_err(|_| parse_err("expected_answer", field(5)))?,
            )
        } else {
            None
        };
        let language = parse_bool(field(6)).ok_or_else(|| parse_err("language_test_passed", field(6)))?;
        let duration: f64 = field(7)
            .parse()
            .map_err(|_| parse_err("duration_seconds", field(7)))?;

        let entry = sessions.entry(session_id.clone()).or_insert_with(|| {
            order.push(session_id.clone());
            RatingSubmission {
                rater_id: field(1).to_string(),
                session_id,
                items: Vec::new(),
                language_test_passed: language,
                duration_seconds: duration,
            }
        });
        entry.items.push(RatedItem {
            sentence_id: field(2).to_string(),
            rating,
            gold_expected,
        });
    }
    Ok(order
        .into_iter()
        .map(|id| sessions.remove(&id).expect("session recorded in order list"))
        .collect())
}

fn parse_bool(raw: &str) -> Option<bool> {
    match raw.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}

/// Write submissions in the format [`load_submissions`] reads.
pub fn save_submissions(
    submissions: &[RatingSubmission],
    path: impl AsRef<Path>,
) -> Result<(), RatingsError> {
    let path = path.as_ref();
    let path_str = path.display().to_string();
    let mut writer = csv::Writer::from_path(path).map_err(|e| RatingsError::Format {
        path: path_str.clone(),
        message: e.to_string(),
    })?;
    let write = |writer: &mut csv::Writer<std::fs::File>| -> csv::Result<()> {
        writer.write_record(SUBMISSION_HEADER)?;
        for sub in submissions {
            for item in &sub.items {
                writer.write_record([
                    sub.session_id.as_str(),
                    sub.rater_id.as_str(),
                    item.sentence_id.as_str(),
                    &item.rating.to_string(),
                    if item.gold_expected.is_some() { "true" } else { "false" },
                    &item.gold_expected.map(|e| e.to_string()).unwrap_or_default(),
                    if sub.language_test_passed { "true" } else { "false" },
                    &sub.duration_seconds.to_string(),
                ])?;
            }
        }
        writer.flush()?;
        Ok(())
    };
    write(&mut writer).map_err(|e| RatingsError::Format {
        path: path_str,
        message: e.to_string(),
    })
}

/// Write MOS records as delimited text (`sentence_id, mos, n_ratings, std_dev`).
pub fn save_mos_records(records: &[MosRecord], path: impl AsRef<Path>) -> Result<(), RatingsError> {
    let path = path.as_ref();
    let path_str = path.display().to_string();
    let mut writer = csv::Writer::from_path(path).map_err(|e| RatingsError::Format {
        path: path_str.clone(),
        message: e.to_string(),
    })?;
    let write = |writer: &mut csv::Writer<std::fs::File>| -> csv::Result<()> {
        writer.write_record(["sentence_id", "mos", "n_ratings", "std_dev"])?;
        for r in records {
            writer.write_record([
                r.sentence_id.as_str(),
                &r.mos.to_string(),
                &r.n_ratings.to_string(),
                &r.std_dev.to_string(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    };
    write(&mut writer).map_err(|e| RatingsError::Format {
        path: path_str,
        message: e.to_string(),
    })
}

/// Read MOS records written by [`save_mos_records`].
pub fn load_mos_records(path: impl AsRef<Path>) -> Result<Vec<MosRecord>, RatingsError> {
    let path = path.as_ref();
    let path_str = path.display().to_string();
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => RatingsError::Io {
            path: path_str.clone(),
            source: io,
        },
        kind => RatingsError::Format {
            path: path_str.clone(),
            message: format!("{kind:?}"),
        },
    })?;
    let mut records = Vec::new();
    for (row_no, record) in reader.deserialize::<MosRecord>().enumerate() {
        records.push(record.map_err(|e| RatingsError::Format {
            path: path_str.clone(),
            message: format!("row {}: {e}", row_no + 1),
        })?);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A well-formed session: ten non-gold ratings plus a gold item.
    pub(crate) fn session(
        session_id: &str,
        ratings: [u8; 10],
        gold_given: u8,
        gold_expected: u8,
        language_ok: bool,
        duration: f64,
    ) -> RatingSubmission {
        let mut items: Vec<RatedItem> = ratings
            .iter()
            .enumerate()
            .map(|(i, &r)| RatedItem {
                sentence_id: format!("{session_id}-s{i}"),
                rating: r,
                gold_expected: None,
            })
            .collect();
        items.insert(
            5,
            RatedItem {
                sentence_id: format!("{session_id}-gold"),
                rating: gold_given,
                gold_expected: Some(gold_expected),
            },
        );
        RatingSubmission {
            rater_id: format!("rater-{session_id}"),
            session_id: session_id.to_string(),
            items,
            language_test_passed: language_ok,
            duration_seconds: duration,
        }
    }

    const SPREAD: [u8; 10] = [1, 6, 3, 5, 2, 7, 4, 3, 6, 2];

    #[test]
    fn gold_failure_is_removed() {
        let subs = vec![session("a", SPREAD, 2, 6, true, 300.0)];
        let (kept, report) = clean_submissions(&subs, &CleaningConfig::default());
        assert!(kept.is_empty());
        assert_eq!(report.removed_gold, 1);
        assert_eq!(report.removed_union, 1);
        assert_eq!(report.kept, 0);
    }

    #[test]
    fn constant_ratings_are_a_click_pattern() {
        let subs = vec![session("b", [4; 10], 6, 6, true, 300.0)];
        let (kept, report) = clean_submissions(&subs, &CleaningConfig::default());
        assert!(kept.is_empty());
        assert_eq!(report.removed_click_pattern, 1);
        assert_eq!(report.removed_gold, 0);
    }

    #[test]
    fn passing_submission_is_kept() {
        // Variance of SPREAD is well above the 0.5 default.
        let subs = vec![session("c", SPREAD, 6, 6, true, 300.0)];
        let (kept, report) = clean_submissions(&subs, &CleaningConfig::default());
        assert_eq!(kept.len(), 1);
        assert_eq!(report.kept, 1);
        assert_eq!(report.removed_union, 0);
    }

    #[test]
    fn too_fast_and_language_rules() {
        let subs = vec![
            session("fast", SPREAD, 6, 6, true, 30.0),
            session("lang", SPREAD, 6, 6, false, 300.0),
        ];
        let (kept, report) = clean_submissions(&subs, &CleaningConfig::default());
        assert!(kept.is_empty());
        assert_eq!(report.removed_too_fast, 1);
        assert_eq!(report.removed_language_test, 1);
        assert_eq!(report.removed_union, 2);
    }

    #[test]
    fn multiple_failures_count_once_per_rule() {
        // Fails gold + language + speed at once.
        let subs = vec![session("multi", SPREAD, 1, 7, false, 5.0)];
        let (_, report) = clean_submissions(&subs, &CleaningConfig::default());
        assert_eq!(report.removed_gold, 1);
        assert_eq!(report.removed_language_test, 1);
        assert_eq!(report.removed_too_fast, 1);
        assert_eq!(report.removed_union, 1);
        assert_eq!(report.kept + report.removed_union + report.malformed.len(), report.total);
    }

    #[test]
    fn malformed_sessions_counted_separately() {
        let mut short = session("short", SPREAD, 6, 6, true, 300.0);
        short.items.truncate(9);
        let mut no_gold = session("nogold", SPREAD, 6, 6, true, 300.0);
        no_gold.items.retain(|i| i.gold_expected.is_none());
        no_gold.items.push(RatedItem {
            sentence_id: "extra".into(),
            rating: 4,
            gold_expected: None,
        });
        let (kept, report) = clean_submissions(&[short, no_gold], &CleaningConfig::default());
        assert!(kept.is_empty());
        assert_eq!(report.malformed.len(), 2);
        assert_eq!(report.removed_union, 0);
        assert!(report.malformed[0].reason.contains("11"));
        assert!(report.malformed[1].reason.contains("gold"));
    }

    #[test]
    fn cleaning_is_order_independent() {
        let subs = vec![
            session("a", SPREAD, 6, 6, true, 300.0),
            session("b", SPREAD, 2, 6, true, 300.0),
            session("c", [4; 10], 6, 6, true, 300.0),
            session("d", SPREAD, 6, 6, false, 300.0),
        ];
        let mut reversed = subs.clone();
        reversed.reverse();
        let (kept_a, report_a) = clean_submissions(&subs, &CleaningConfig::default());
        let (kept_b, report_b) = clean_submissions(&reversed, &CleaningConfig::default());
        let ids = |v: &[RatingSubmission]| {
            let mut ids: Vec<String> = v.iter().map(|s| s.session_id.clone()).collect();
            ids.sort();
            ids
        };
        assert_eq!(ids(&kept_a), ids(&kept_b));
        assert_eq!(report_a.removed_gold, report_b.removed_gold);
        assert_eq!(report_a.removed_union, report_b.removed_union);
        assert_eq!(report_a.kept, report_b.kept);
    }

    #[test]
    fn aggregate_simple_mean() {
        let ratings = vec![
            ("s1".to_string(), 3u8),
            ("s1".to_string(), 4u8),
            ("s1".to_string(), 5u8),
        ];
        let records = aggregate_mos(&ratings).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].mos, 4.0);
        assert_eq!(records[0].n_ratings, 3);
    }

    #[test]
    fn aggregate_singleton() {
        let records = aggregate_mos(&[("s".to_string(), 7u8)]).unwrap();
        assert_eq!(records[0].mos, 7.0);
        assert_eq!(records[0].std_dev, 0.0);
        assert_eq!(records[0].n_ratings, 1);
    }

    #[test]
    fn aggregate_matches_naive_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let ratings: Vec<(String, u8)> = (0..16)
            .map(|_| ("s".to_string(), rng.gen_range(1..=7u8)))
            .collect();
        let records = aggregate_mos(&ratings).unwrap();
        // Independent naive-summation oracle.
        let mut sum = 0.0f64;
        for (_, r) in &ratings {
            sum += *r as f64;
        }
        let oracle = sum / ratings.len() as f64;
        assert!((records[0].mos - oracle).abs() < 1e-12);
        assert_eq!(records[0].n_ratings, 16);
    }

    #[test]
    fn aggregate_is_permutation_invariant() {
        let mut ratings = vec![
            ("b".to_string(), 2u8),
            ("a".to_string(), 7u8),
            ("b".to_string(), 5u8),
            ("a".to_string(), 1u8),
        ];
        let first = aggregate_mos(&ratings).unwrap();
        ratings.reverse();
        let second = aggregate_mos(&ratings).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn aggregate_rejects_empty() {
        assert!(matches!(aggregate_mos(&[]), Err(RatingsError::EmptyInput)));
    }

    #[test]
    fn fit_identity_line_exactly() {
        let anchors: Vec<(f64, f64)> = (1..=7).map(|i| (i as f64, i as f64)).collect();
        let m = fit_mapping(&anchors).unwrap();
        assert!((m.slope - 1.0).abs() < 1e-12);
        assert!(m.intercept.abs() < 1e-12);
        assert!(m.fit_residual < 1e-12);
        assert_eq!(m.n_anchors, 7);
    }

    #[test]
    fn fit_recovers_exact_affine_line() {
        let anchors: Vec<(f64, f64)> = (0..20)
            .map(|i| {
                let x = 1.0 + i as f64 * 0.3;
                (x, 0.9 * x + 0.3)
            })
            .collect();
        let m = fit_mapping(&anchors).unwrap();
        assert!((m.slope - 0.9).abs() < 1e-12);
        assert!((m.intercept - 0.3).abs() < 1e-12);
        assert!(m.fit_residual < 1e-12);
    }

    #[test]
    fn fit_rejects_degenerate_input() {
        assert!(matches!(fit_mapping(&[(1.0, 2.0)]), Err(RatingsError::TooFewAnchors(1))));
        let constant: Vec<(f64, f64)> = vec![(3.0, 1.0), (3.0, 2.0), (3.0, 3.0)];
        assert!(matches!(fit_mapping(&constant), Err(RatingsError::DegenerateFit)));
    }

    fn record(id: &str, mos: f64) -> MosRecord {
        MosRecord {
            sentence_id: id.to_string(),
            mos,
            n_ratings: 16,
            std_dev: 0.8,
        }
    }

    #[test]
    fn apply_identity_keeps_records() {
        let records = vec![record("a", 3.0), record("b", 6.5)];
        let mapped = apply_mapping(&MappingFunction::identity(), &records);
        assert_eq!(mapped, records);
    }

    #[test]
    fn apply_shifts_mos_and_scales_std() {
        let mapped = apply_mapping(&MappingFunction::from_coefficients(1.0, 0.5), &[record("a", 3.0)]);
        assert_eq!(mapped[0].mos, 3.5);
        assert_eq!(mapped[0].std_dev, 0.8);
        let scaled = apply_mapping(&MappingFunction::from_coefficients(-2.0, 0.0), &[record("a", 3.0)]);
        assert_eq!(scaled[0].std_dev, 1.6);
    }

    #[test]
    fn mapping_composition_matches_sequential_application() {
        let m1 = MappingFunction::from_coefficients(0.85, 0.4);
        let m2 = MappingFunction::from_coefficients(1.1, -0.2);
        let records = vec![record("a", 2.4), record("b", 5.9), record("c", 7.0)];
        let sequential = apply_mapping(&m2, &apply_mapping(&m1, &records));
        let composed = apply_mapping(&m1.then(&m2), &records);
        for (s, c) in sequential.iter().zip(&composed) {
            assert!((s.mos - c.mos).abs() < 1e-12);
            assert!((s.std_dev - c.std_dev).abs() < 1e-12);
        }
    }

    #[test]
    fn anchor_pairs_joins_on_shared_ids() {
        let records = vec![record("shared-1", 2.0), record("only-exp", 3.0), record("shared-2", 4.0)];
        let mut reference = BTreeMap::new();
        reference.insert("shared-1".to_string(), 2.2);
        reference.insert("shared-2".to_string(), 4.4);
        reference.insert("only-ref".to_string(), 6.0);
        let pairs = anchor_pairs(&records, &reference);
        assert_eq!(pairs, vec![(2.0, 2.2), (4.0, 4.4)]);
    }
}
