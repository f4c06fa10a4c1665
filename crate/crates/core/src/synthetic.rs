//! Deterministic synthetic data: corpora with a known length signal,
//! rating submissions with planted cleaning violations, and feature
//! matrices with planted selection targets. Everything is a pure function
//! of its seed.

use crate::corpus::{Corpus, LabeledSentence, Sentence, SplitTag, MOS_MAX, MOS_MIN};
use crate::features::{FeatureMatrix, FeatureVector};
use crate::ratings::{RatedItem, RatingSubmission};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Words the synthetic sentences are drawn from; exposed so downstream
/// vocabularies can cover them.
pub const WORD_POOL: &[&str] = &[
    "der", "die", "das", "ein", "eine", "und", "oder", "aber", "wenn", "weil", "nicht", "auch",
    "Haus", "Baum", "Katze", "Hund", "Kind", "Stadt", "Wasser", "Himmel", "Garten", "Schule",
    "Lehrer", "Freund", "Mutter", "Vater", "Berg", "Fluss", "Antwort", "Geschichte",
    "läuft", "springt", "liest", "schreibt", "denkt", "spielt", "bleibt", "findet",
    "schnell", "langsam", "groß", "klein", "alt", "jung", "schön", "wichtig", "ruhig",
    "heute", "morgen", "gestern", "hier", "dort", "sehr", "oft", "manchmal", "vielleicht",
    "Wissenschaft", "Entwicklung", "Verantwortung", "Geschwindigkeit", "Zusammenarbeit",
];

fn gauss(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn capitalize(text: &str) -> String {
    let mut chars = text.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

/// A corpus whose complexity score is affine in the word count plus a
/// little Gaussian noise, clamped to the MOS range: roughly
/// `1.2 + 0.2 * (words - 3) + N(0, 0.25)` for 3 to 30 words.
pub fn synthetic_corpus(n: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let items = (0..n)
        .map(|i| {
            let k = rng.gen_range(3usize..=30);
            let words: Vec<&str> = (0..k)
                .map(|_| *WORD_POOL.choose(&mut rng).expect("pool is not empty"))
                .collect();
            let mut text = capitalize(&words.join(" "));
            text.push('.');
            let mos = (1.2 + 0.2 * (k as f64 - 3.0) + 0.25 * gauss(&mut rng))
                .clamp(MOS_MIN, MOS_MAX);
            LabeledSentence {
                sentence: Sentence {
                    id: format!("syn-{i:04}"),
                    text,
                    source: format!("art-{}", i % 10),
                    experiment_id: None,
                },
                mos_complexity: mos,
                mos_understandability: None,
                mos_lexical: None,
                n_ratings: 16,
            }
        })
        .collect();
    Corpus::new("synthetic", items, SplitTag::Unsplit)
}

/// How many submissions of each kind to plant. Every non-clean submission
/// violates exactly one cleaning rule, so per-rule removal counts must
/// equal these numbers and the union must equal their sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlantSpec {
    pub clean: usize,
    pub gold_fail: usize,
    pub language_fail: usize,
    pub click_pattern: usize,
    pub too_fast: usize,
}

impl PlantSpec {
    pub fn total(&self) -> usize {
        self.clean + self.gold_fail + self.language_fail + self.click_pattern + self.too_fast
    }
}

pub struct PlantedSubmissions {
    /// Seeded-shuffled order, so cleaning cannot rely on construction order.
    pub submissions: Vec<RatingSubmission>,
    /// Session ids of the planted-clean submissions, sorted.
    pub clean_sessions: Vec<String>,
}

#[derive(Clone, Copy)]
enum Kind {
    Clean,
    GoldFail,
    LanguageFail,
    ClickPattern,
    TooFast,
}

/// Spread pattern with population variance 4.09, far above any sane
/// click-pattern threshold.
const RATING_PATTERN: [u8; 10] = [1, 2, 3, 4, 5, 6, 7, 1, 4, 6];

pub fn planted_submissions(spec: &PlantSpec, seed: u64) -> PlantedSubmissions {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kinds = Vec::with_capacity(spec.total());
    kinds.extend(std::iter::repeat_n(Kind::Clean, spec.clean));
    kinds.extend(std::iter::repeat_n(Kind::GoldFail, spec.gold_fail));
    kinds.extend(std::iter::repeat_n(Kind::LanguageFail, spec.language_fail));
    kinds.extend(std::iter::repeat_n(Kind::ClickPattern, spec.click_pattern));
    kinds.extend(std::iter::repeat_n(Kind::TooFast, spec.too_fast));

    let mut submissions = Vec::with_capacity(kinds.len());
    let mut clean_sessions = Vec::new();
    for (i, kind) in kinds.iter().enumerate() {
        let session_id = format!("sess-{i:04}");
        let mut ratings = RATING_PATTERN;
        ratings.shuffle(&mut rng);
        if let Kind::ClickPattern = kind {
            ratings = [rng.gen_range(1..=7); 10];
        }

        let mut sentence_ids: Vec<usize> = (0..50).collect();
        sentence_ids.shuffle(&mut rng);
        let expected = rng.gen_range(1..=7u8);
        let gold_rating = match kind {
            Kind::GoldFail => expected % 7 + 1,
            _ => expected,
        };
        let gold_at = rng.gen_range(0..11);
        let mut items: Vec<RatedItem> = sentence_ids[..10]
            .iter()
            .zip(ratings)
            .map(|(&s, rating)| RatedItem {
                sentence_id: format!("sent-{s:03}"),
                rating,
                gold_expected: None,
            })
            .collect();
        items.insert(
            gold_at,
            RatedItem {
                sentence_id: "sent-gold".to_string(),
                rating: gold_rating,
                gold_expected: Some(expected),
            },
        );

        let duration_seconds = match kind {
            Kind::TooFast => rng.gen_range(10.0..50.0),
            _ => rng.gen_range(70.0..200.0),
        };
        if let Kind::Clean = kind {
            clean_sessions.push(session_id.clone());
        }
        submissions.push(RatingSubmission {
            rater_id: format!("rater-{i:04}"),
            session_id,
            items,
            language_test_passed: !matches!(kind, Kind::LanguageFail),
            duration_seconds,
        });
    }
    submissions.shuffle(&mut rng);
    clean_sessions.sort();
    PlantedSubmissions {
        submissions,
        clean_sessions,
    }
}

pub struct PlantedSelection {
    pub matrix: FeatureMatrix,
    pub targets: Vec<f64>,
    /// Drives the targets; must survive every selection stage.
    pub signal: String,
    /// Affine image of the signal; the correlation filter must drop it.
    pub duplicate: String,
    /// Exceeds any sane missing-fraction threshold; the missing filter
    /// must drop it.
    pub high_missing: String,
}

/// A matrix of `n_noise + 3` columns: independent noise plus a signal
/// column, an affine duplicate of it placed later, and a column with 40%
/// missing cells. Targets are `2.5 * signal + N(0, 0.2)`.
pub fn planted_selection(n_rows: usize, n_noise: usize, seed: u64) -> PlantedSelection {
    assert!(n_rows >= 4, "need a few rows for correlations");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let signal: Vec<f64> = (0..n_rows).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let duplicate: Vec<f64> = signal.iter().map(|v| 1.7 * v - 0.3).collect();
    let n_missing = (0.4 * n_rows as f64).round() as usize;
    let mut missing_rows: Vec<usize> = (0..n_rows).collect();
    missing_rows.shuffle(&mut rng);
    let missing_rows: std::collections::HashSet<usize> =
        missing_rows[..n_missing].iter().copied().collect();
    let sparse: Vec<Option<f64>> = (0..n_rows)
        .map(|i| {
            if missing_rows.contains(&i) {
                None
            } else {
                Some(rng.gen_range(-1.0..1.0))
            }
        })
        .collect();
    let targets: Vec<f64> = signal.iter().map(|&v| 2.5 * v + 0.2 * gauss(&mut rng)).collect();

    // Scatter the planted columns among the noise.
    let lead = n_noise / 4;
    let mid = n_noise / 3;
    let late = n_noise / 4;
    let rest = n_noise - lead - mid - late;
    let mut plan: Vec<Option<&str>> = Vec::with_capacity(n_noise + 3);
    plan.extend(std::iter::repeat_n(None, lead));
    plan.push(Some("signal"));
    plan.extend(std::iter::repeat_n(None, mid));
    plan.push(Some("signal_scaled"));
    plan.extend(std::iter::repeat_n(None, late));
    plan.push(Some("sparse"));
    plan.extend(std::iter::repeat_n(None, rest));

    let mut names: Vec<String> = Vec::with_capacity(plan.len());
    let mut columns: Vec<Vec<Option<f64>>> = Vec::with_capacity(plan.len());
    let mut noise_count = 0usize;
    for slot in plan {
        match slot {
            None => {
                names.push(format!("noise_{noise_count:02}"));
                columns.push((0..n_rows).map(|_| Some(rng.gen_range(-1.0..1.0))).collect());
                noise_count += 1;
            }
            Some("signal") => {
                names.push("signal".to_string());
                columns.push(signal.iter().map(|&v| Some(v)).collect());
            }
            Some("signal_scaled") => {
                names.push("signal_scaled".to_string());
                columns.push(duplicate.iter().map(|&v| Some(v)).collect());
            }
            Some(other) => {
                names.push(other.to_string());
                columns.push(sparse.clone());
            }
        }
    }

    let rows = (0..n_rows)
        .map(|i| FeatureVector {
            sentence_id: format!("row-{i:04}"),
            values: names
                .iter()
                .zip(&columns)
                .map(|(name, col)| (name.clone(), col[i]))
                .collect::<BTreeMap<_, _>>(),
        })
        .collect();
    PlantedSelection {
        matrix: FeatureMatrix {
            feature_names: names,
            rows,
        },
        targets,
        signal: "signal".to_string(),
        duplicate: "signal_scaled".to_string(),
        high_missing: "sparse".to_string(),
    }
}
