//! Sentence-level German readability scoring.
//!
//! The crate covers the deterministic half of the toolkit:
//!
//! * [`corpus`] — loading, validating, splitting and summarizing MOS-labeled
//!   sentence corpora,
//! * [`ratings`] — cleansing raw rater submissions, aggregating mean opinion
//!   scores and aligning MOS scales across experiments,
//! * [`features`] — the linguistic feature catalog and the three-stage
//!   feature-selection pipeline,
//! * [`forest`] / [`baseline`] — a seeded random-forest regressor and the
//!   persisted baseline model built on top of it,
//! * [`evaluation`] — RMSE / Pearson / Spearman and report rendering.
//!
//! Data-parallel inner loops (tree training, batch feature extraction) run on
//! rayon when the `parallel` feature is enabled (the default) and fall back to
//! sequential iteration otherwise. Both paths produce identical results; see
//! [`exec::ExecMode`].

pub mod baseline;
pub mod corpus;
pub mod evaluation;
pub mod exec;
pub mod features;
pub mod forest;
pub mod histogram;
pub mod plot;
pub mod provenance;
pub mod ratings;
pub mod synthetic;

pub use corpus::{Corpus, LabeledSentence, Sentence, SplitTag};
pub use evaluation::EvalReport;
pub use exec::ExecMode;
pub use features::{FeatureCatalog, FeatureMatrix, FeatureVector};
pub use histogram::Histogram;
pub use ratings::{CleaningReport, MappingFunction, MosRecord, RatingSubmission};
