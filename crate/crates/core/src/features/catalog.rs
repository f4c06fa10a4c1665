//! The default feature catalog: 73 extractors over three groups
//! (traditional, lexical, morphological).
//!
//! Every extractor is a pure function of precomputed per-sentence statistics
//! and returns `None` (MISSING) when its resource is disabled or its
//! denominator is empty; extraction never fails.

use crate::features::resources::Resources;
use crate::features::tagger::{self, PosTag};
use crate::features::text::{self, TokenizedSentence};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureGroup {
    Traditional,
    Lexical,
    Morphological,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResourceNeed {
    None,
    Frequency,
    Tagger,
}

/// Precomputed statistics one sentence's extractors share.
pub struct SentenceStats {
    toks: TokenizedSentence,
    word_letters: Vec<usize>,
    word_sylls: Vec<usize>,
    tags: Option<Vec<PosTag>>,
    freq: Option<FreqInfo>,
}

struct FreqInfo {
    ranks: Vec<Option<usize>>,
    log_freqs: Vec<f64>,
    stopword: Vec<bool>,
    list_len: usize,
}

impl SentenceStats {
    pub fn compute(text: &str, resources: &Resources) -> Self {
        let toks = text::tokenize(text);
        let word_letters = toks.words.iter().map(|w| text::letters(w)).collect();
        let word_sylls = toks.words.iter().map(|w| text::syllables(w)).collect();
        let tags = resources.tagger.as_ref().map(|t| t.tag_words(&toks.words));
        let freq = resources.frequency.as_ref().map(|list| FreqInfo {
            ranks: toks.words.iter().map(|w| list.rank(w)).collect(),
            log_freqs: toks.words.iter().map(|w| list.log_freq(w)).collect(),
            stopword: toks.words.iter().map(|w| list.is_stopword(w)).collect(),
            list_len: list.len(),
        });
        SentenceStats {
            toks,
            word_letters,
            word_sylls,
            tags,
            freq,
        }
    }

    fn n_words(&self) -> usize {
        self.toks.words.len()
    }
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mid = sorted.len() / 2;
    Some(if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    })
}

fn std_pop(values: &[f64]) -> Option<f64> {
    let m = mean(values)?;
    Some((values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64).sqrt())
}

fn ratio(part: usize, whole: usize) -> Option<f64> {
    if whole == 0 {
        None
    } else {
        Some(part as f64 / whole as f64)
    }
}

// --- traditional ---------------------------------------------------------

fn f_sentence_char_length(s: &SentenceStats) -> Option<f64> {
    Some(s.toks.char_length as f64)
}
fn f_sentence_char_length_no_spaces(s: &SentenceStats) -> Option<f64> {
    Some(s.toks.char_length_no_spaces as f64)
}
fn f_word_count(s: &SentenceStats) -> Option<f64> {
    Some(s.n_words() as f64)
}
fn f_letter_count(s: &SentenceStats) -> Option<f64> {
    Some(s.word_letters.iter().sum::<usize>() as f64)
}
fn f_syllable_count(s: &SentenceStats) -> Option<f64> {
    Some(s.word_sylls.iter().sum::<usize>() as f64)
}
fn word_lengths(s: &SentenceStats) -> Vec<f64> {
    s.word_letters.iter().map(|&l| l as f64).collect()
}
fn f_avg_word_length_chars(s: &SentenceStats) -> Option<f64> {
    mean(&word_lengths(s))
}
fn f_avg_word_length_syllables(s: &SentenceStats) -> Option<f64> {
    mean(&s.word_sylls.iter().map(|&v| v as f64).collect::<Vec<_>>())
}
fn f_max_word_length_chars(s: &SentenceStats) -> Option<f64> {
    s.word_letters.iter().max().map(|&v| v as f64)
}
fn f_min_word_length_chars(s: &SentenceStats) -> Option<f64> {
    s.word_letters.iter().min().map(|&v| v as f64)
}
fn f_median_word_length_chars(s: &SentenceStats) -> Option<f64> {
    median(&word_lengths(s))
}
fn f_std_word_length_chars(s: &SentenceStats) -> Option<f64> {
    std_pop(&word_lengths(s))
}
fn long_words(s: &SentenceStats) -> usize {
    s.word_letters.iter().filter(|&&l| l > 6).count()
}
fn f_long_word_count(s: &SentenceStats) -> Option<f64> {
    Some(long_words(s) as f64)
}
fn f_long_word_ratio(s: &SentenceStats) -> Option<f64> {
    ratio(long_words(s), s.n_words())
}
fn polysyllables(s: &SentenceStats) -> usize {
    s.word_sylls.iter().filter(|&&v| v >= 3).count()
}
fn f_polysyllable_count(s: &SentenceStats) -> Option<f64> {
    Some(polysyllables(s) as f64)
}
fn f_polysyllable_ratio(s: &SentenceStats) -> Option<f64> {
    ratio(polysyllables(s), s.n_words())
}
fn monosyllables(s: &SentenceStats) -> usize {
    s.word_sylls.iter().filter(|&&v| v == 1).count()
}
fn f_monosyllable_count(s: &SentenceStats) -> Option<f64> {
    Some(monosyllables(s) as f64)
}
fn f_monosyllable_ratio(s: &SentenceStats) -> Option<f64> {
    ratio(monosyllables(s), s.n_words())
}
fn f_punctuation_count(s: &SentenceStats) -> Option<f64> {
    Some(s.toks.punctuation as f64)
}
fn f_comma_count(s: &SentenceStats) -> Option<f64> {
    Some(s.toks.commas as f64)
}
fn f_colon_semicolon_count(s: &SentenceStats) -> Option<f64> {
    Some(s.toks.colons_semicolons as f64)
}
fn f_quote_count(s: &SentenceStats) -> Option<f64> {
    Some(s.toks.quotes as f64)
}
fn f_parenthesis_count(s: &SentenceStats) -> Option<f64> {
    Some(s.toks.parentheses as f64)
}
fn f_hyphen_count(s: &SentenceStats) -> Option<f64> {
    Some(s.toks.hyphens as f64)
}
fn f_digit_token_count(s: &SentenceStats) -> Option<f64> {
    Some(s.toks.numbers.len() as f64)
}
fn f_digit_token_ratio(s: &SentenceStats) -> Option<f64> {
    ratio(s.toks.numbers.len(), s.n_words() + s.toks.numbers.len())
}
fn f_capitalized_word_ratio(s: &SentenceStats) -> Option<f64> {
    let caps = s
        .toks
        .words
        .iter()
        .filter(|w| w.chars().next().is_some_and(|c| c.is_uppercase()))
        .count();
    ratio(caps, s.n_words())
}
fn f_all_caps_word_count(s: &SentenceStats) -> Option<f64> {
    let count = s
        .toks
        .words
        .iter()
        .filter(|w| {
            w.chars().filter(|c| c.is_alphabetic()).count() >= 2
                && w.chars().all(|c| !c.is_alphabetic() || c.is_uppercase())
        })
        .count();
    Some(count as f64)
}

/// Flesch Reading Ease with Amstad's German coefficients:
/// `180 − ASL − 58.5 · ASW` over this single sentence.
fn f_flesch_reading_ease_german(s: &SentenceStats) -> Option<f64> {
    let n = s.n_words();
    if n == 0 {
        return None;
    }
    let asl = n as f64;
    let asw = s.word_sylls.iter().sum::<usize>() as f64 / n as f64;
    Some(180.0 - asl - 58.5 * asw)
}

/// Shared Wiener Sachtextformel terms: MS, SL, IW, ES (percentages except SL).
fn wstf_terms(s: &SentenceStats) -> Option<(f64, f64, f64, f64)> {
    let n = s.n_words();
    if n == 0 {
        return None;
    }
    let ms = 100.0 * polysyllables(s) as f64 / n as f64;
    let sl = n as f64;
    let iw = 100.0 * long_words(s) as f64 / n as f64;
    let es = 100.0 * monosyllables(s) as f64 / n as f64;
    Some((ms, sl, iw, es))
}
fn f_wstf_1(s: &SentenceStats) -> Option<f64> {
    let (ms, sl, iw, es) = wstf_terms(s)?;
    Some(0.1935 * ms + 0.1672 * sl + 0.1297 * iw - 0.0327 * es - 0.875)
}
fn f_wstf_2(s: &SentenceStats) -> Option<f64> {
    let (ms, sl, iw, _) = wstf_terms(s)?;
    Some(0.2007 * ms + 0.1682 * sl + 0.1373 * iw - 2.779)
}
fn f_wstf_3(s: &SentenceStats) -> Option<f64> {
    let (ms, sl, _, _) = wstf_terms(s)?;
    Some(0.2963 * ms + 0.1905 * sl - 1.1144)
}
fn f_wstf_4(s: &SentenceStats) -> Option<f64> {
    let (ms, sl, _, _) = wstf_terms(s)?;
    Some(0.2744 * ms + 0.2656 * sl - 1.693)
}

// --- lexical -------------------------------------------------------------

fn lowercase_words(s: &SentenceStats) -> Vec<String> {
    s.toks.words.iter().map(|w| w.to_lowercase()).collect()
}
fn distinct_count(s: &SentenceStats) -> usize {
    lowercase_words(s)
        .into_iter()
        .collect::<std::collections::HashSet<_>>()
        .len()
}
fn f_type_token_ratio(s: &SentenceStats) -> Option<f64> {
    ratio(distinct_count(s), s.n_words())
}
fn f_herdan_c(s: &SentenceStats) -> Option<f64> {
    let n = s.n_words();
    if n < 2 {
        return None;
    }
    Some((distinct_count(s) as f64).ln() / (n as f64).ln())
}
fn f_unique_word_count(s: &SentenceStats) -> Option<f64> {
    Some(distinct_count(s) as f64)
}
fn f_repeated_word_count(s: &SentenceStats) -> Option<f64> {
    Some((s.n_words() - distinct_count(s)) as f64)
}
fn f_hapax_ratio(s: &SentenceStats) -> Option<f64> {
    let words = lowercase_words(s);
    let mut counts = std::collections::HashMap::new();
    for w in &words {
        *counts.entry(w.as_str()).or_insert(0usize) += 1;
    }
    let hapax = counts.values().filter(|&&c| c == 1).count();
    ratio(hapax, s.n_words())
}

fn stopword_count(s: &SentenceStats) -> Option<usize> {
    Some(s.freq.as_ref()?.stopword.iter().filter(|&&b| b).count())
}
fn f_stopword_count(s: &SentenceStats) -> Option<f64> {
    Some(stopword_count(s)? as f64)
}
fn f_stopword_ratio(s: &SentenceStats) -> Option<f64> {
    ratio(stopword_count(s)?, s.n_words())
}
fn f_lexical_density(s: &SentenceStats) -> Option<f64> {
    Some(1.0 - f_stopword_ratio(s)?)
}
fn f_mean_word_log_freq(s: &SentenceStats) -> Option<f64> {
    mean(&s.freq.as_ref()?.log_freqs)
}
fn f_min_word_log_freq(s: &SentenceStats) -> Option<f64> {
    let fi = s.freq.as_ref()?;
    fi.log_freqs.iter().copied().reduce(f64::min)
}
fn f_max_word_log_freq(s: &SentenceStats) -> Option<f64> {
    let fi = s.freq.as_ref()?;
    fi.log_freqs.iter().copied().reduce(f64::max)
}
fn f_std_word_log_freq(s: &SentenceStats) -> Option<f64> {
    std_pop(&s.freq.as_ref()?.log_freqs)
}
fn f_median_word_log_freq(s: &SentenceStats) -> Option<f64> {
    median(&s.freq.as_ref()?.log_freqs)
}
fn word_ranks_with_tail(s: &SentenceStats) -> Option<Vec<f64>> {
    let fi = s.freq.as_ref()?;
    Some(
        fi.ranks
            .iter()
            .map(|r| r.unwrap_or(fi.list_len + 1) as f64)
            .collect(),
    )
}
fn f_mean_word_rank(s: &SentenceStats) -> Option<f64> {
    mean(&word_ranks_with_tail(s)?)
}
fn f_median_word_rank(s: &SentenceStats) -> Option<f64> {
    median(&word_ranks_with_tail(s)?)
}
fn oov_count(s: &SentenceStats) -> Option<usize> {
    Some(s.freq.as_ref()?.ranks.iter().filter(|r| r.is_none()).count())
}
fn f_oov_count(s: &SentenceStats) -> Option<f64> {
    Some(oov_count(s)? as f64)
}
fn f_oov_ratio(s: &SentenceStats) -> Option<f64> {
    ratio(oov_count(s)?, s.n_words())
}
fn band_ratio(s: &SentenceStats, max_rank: usize) -> Option<f64> {
    let fi = s.freq.as_ref()?;
    let in_band = fi
        .ranks
        .iter()
        .filter(|r| r.is_some_and(|rank| rank <= max_rank))
        .count();
    ratio(in_band, s.n_words())
}
fn f_band_top100_ratio(s: &SentenceStats) -> Option<f64> {
    band_ratio(s, 100)
}
fn f_band_top500_ratio(s: &SentenceStats) -> Option<f64> {
    band_ratio(s, 500)
}
fn f_band_top1000_ratio(s: &SentenceStats) -> Option<f64> {
    band_ratio(s, 1000)
}
fn f_rare_word_ratio(s: &SentenceStats) -> Option<f64> {
    let fi = s.freq.as_ref()?;
    let rare = fi
        .ranks
        .iter()
        .filter(|r| r.is_none_or(|rank| rank > 1000))
        .count();
    ratio(rare, s.n_words())
}
fn f_content_word_log_freq_mean(s: &SentenceStats) -> Option<f64> {
    let fi = s.freq.as_ref()?;
    let content: Vec<f64> = fi
        .log_freqs
        .iter()
        .zip(&fi.stopword)
        .filter(|(_, &stop)| !stop)
        .map(|(&lf, _)| lf)
        .collect();
    mean(&content)
}

// --- morphological -------------------------------------------------------

fn tag_count(s: &SentenceStats, tag: PosTag) -> Option<usize> {
    Some(s.tags.as_ref()?.iter().filter(|&&t| t == tag).count())
}
fn tag_ratio(s: &SentenceStats, tag: PosTag) -> Option<f64> {
    ratio(tag_count(s, tag)?, s.n_words())
}
fn f_noun_ratio(s: &SentenceStats) -> Option<f64> {
    tag_ratio(s, PosTag::Noun)
}
fn f_verb_ratio(s: &SentenceStats) -> Option<f64> {
    tag_ratio(s, PosTag::Verb)
}
fn f_adjective_ratio(s: &SentenceStats) -> Option<f64> {
    tag_ratio(s, PosTag::Adjective)
}
fn f_function_word_ratio(s: &SentenceStats) -> Option<f64> {
    tag_ratio(s, PosTag::Function)
}
fn f_numeral_token_ratio(s: &SentenceStats) -> Option<f64> {
    tag_ratio(s, PosTag::Numeral)
}
fn f_other_pos_ratio(s: &SentenceStats) -> Option<f64> {
    tag_ratio(s, PosTag::Other)
}
fn f_noun_count(s: &SentenceStats) -> Option<f64> {
    Some(tag_count(s, PosTag::Noun)? as f64)
}
fn f_verb_count(s: &SentenceStats) -> Option<f64> {
    Some(tag_count(s, PosTag::Verb)? as f64)
}
fn f_noun_verb_ratio(s: &SentenceStats) -> Option<f64> {
    let nouns = tag_count(s, PosTag::Noun)?;
    let verbs = tag_count(s, PosTag::Verb)?;
    if verbs == 0 {
        None
    } else {
        Some(nouns as f64 / verbs as f64)
    }
}
fn noun_lengths(s: &SentenceStats) -> Option<Vec<f64>> {
    let tags = s.tags.as_ref()?;
    Some(
        s.word_letters
            .iter()
            .zip(tags)
            .filter(|(_, &t)| t == PosTag::Noun)
            .map(|(&l, _)| l as f64)
            .collect(),
    )
}
fn f_mean_noun_length_chars(s: &SentenceStats) -> Option<f64> {
    mean(&noun_lengths(s)?)
}
fn f_max_noun_length_chars(s: &SentenceStats) -> Option<f64> {
    noun_lengths(s)?.into_iter().reduce(f64::max)
}
/// Long nouns (≥ 12 letters) as a share of nouns: a compounding proxy.
fn f_compound_noun_ratio(s: &SentenceStats) -> Option<f64> {
    let lengths = noun_lengths(s)?;
    if lengths.is_empty() {
        return None;
    }
    Some(lengths.iter().filter(|&&l| l >= 12.0).count() as f64 / lengths.len() as f64)
}
fn first_tag_position(s: &SentenceStats, tag: PosTag) -> Option<f64> {
    let tags = s.tags.as_ref()?;
    let at = tags.iter().position(|&t| t == tag)?;
    Some((at + 1) as f64 / s.n_words() as f64)
}
fn f_first_verb_position(s: &SentenceStats) -> Option<f64> {
    first_tag_position(s, PosTag::Verb)
}
fn f_first_noun_position(s: &SentenceStats) -> Option<f64> {
    first_tag_position(s, PosTag::Noun)
}
fn marker_count(s: &SentenceStats, set: &[&str]) -> Option<f64> {
    s.tags.as_ref()?;
    Some(tagger::count_in(&s.toks.words, set) as f64)
}
fn f_article_count(s: &SentenceStats) -> Option<f64> {
    marker_count(s, tagger::ARTICLES)
}
fn f_pronoun_count(s: &SentenceStats) -> Option<f64> {
    marker_count(s, tagger::PERSONAL_PRONOUNS)
}
fn f_genitive_marker_count(s: &SentenceStats) -> Option<f64> {
    marker_count(s, tagger::GENITIVE_MARKERS)
}
fn f_dative_marker_count(s: &SentenceStats) -> Option<f64> {
    marker_count(s, tagger::DATIVE_MARKERS)
}
fn f_subordinating_conjunction_count(s: &SentenceStats) -> Option<f64> {
    marker_count(s, tagger::SUBORDINATING_CONJUNCTIONS)
}

// --- catalog -------------------------------------------------------------

type ExtractFn = fn(&SentenceStats) -> Option<f64>;

#[derive(Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub group: FeatureGroup,
    pub resource: ResourceNeed,
    pub(crate) extract: ExtractFn,
}

impl std::fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("name", &self.name)
            .field("group", &self.group)
            .field("resource", &self.resource)
            .finish()
    }
}

/// Serializable view of a catalog (names, groups, resource needs).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogDescription {
    pub entries: Vec<CatalogEntryDescription>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogEntryDescription {
    pub name: String,
    pub group: FeatureGroup,
    pub resource: ResourceNeed,
}

#[derive(Debug, Clone)]
pub struct FeatureCatalog {
    pub entries: Vec<CatalogEntry>,
}

impl FeatureCatalog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.name.to_string()).collect()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.name == name)
    }

    /// Catalog restricted to `names`, keeping this catalog's order.
    pub fn subset(&self, names: &[String]) -> Result<FeatureCatalog, crate::features::FeatureError> {
        for name in names {
            if self.position(name).is_none() {
                return Err(crate::features::FeatureError::UnknownFeature(name.clone()));
            }
        }
        Ok(FeatureCatalog {
            entries: self
                .entries
                .iter()
                .filter(|e| names.iter().any(|n| n == e.name))
                .cloned()
                .collect(),
        })
    }

    pub fn describe(&self) -> CatalogDescription {
        CatalogDescription {
            entries: self
                .entries
                .iter()
                .map(|e| CatalogEntryDescription {
                    name: e.name.to_string(),
                    group: e.group,
                    resource: e.resource,
                })
                .collect(),
        }
    }

    pub(crate) fn extract_stats(&self, stats: &SentenceStats) -> Vec<Option<f64>> {
        self.entries.iter().map(|e| (e.extract)(stats)).collect()
    }
}

/// The default 73-entry catalog.
pub fn default_catalog() -> FeatureCatalog {
    use FeatureGroup::*;
    use ResourceNeed::*;
    let e = |name, group, resource, extract: ExtractFn| CatalogEntry {
        name,
        group,
        resource,
        extract,
    };
    FeatureCatalog {
        entries: vec![
            e("sentence_char_length", Traditional, None, f_sentence_char_length),
            e("sentence_char_length_no_spaces", Traditional, None, f_sentence_char_length_no_spaces),
            e("word_count", Traditional, None, f_word_count),
            e("letter_count", Traditional, None, f_letter_count),
            e("syllable_count", Traditional, None, f_syllable_count),
            e("avg_word_length_chars", Traditional, None, f_avg_word_length_chars),
            e("avg_word_length_syllables", Traditional, None, f_avg_word_length_syllables),
            e("max_word_length_chars", Traditional, None, f_max_word_length_chars),
            e("min_word_length_chars", Traditional, None, f_min_word_length_chars),
            e("median_word_length_chars", Traditional, None, f_median_word_length_chars),
            e("std_word_length_chars", Traditional, None, f_std_word_length_chars),
            e("long_word_count", Traditional, None, f_long_word_count),
            e("long_word_ratio", Traditional, None, f_long_word_ratio),
            e("polysyllable_count", Traditional, None, f_polysyllable_count),
            e("polysyllable_ratio", Traditional, None, f_polysyllable_ratio),
            e("monosyllable_count", Traditional, None, f_monosyllable_count),
            e("monosyllable_ratio", Traditional, None, f_monosyllable_ratio),
            e("punctuation_count", Traditional, None, f_punctuation_count),
            e("comma_count", Traditional, None, f_comma_count),
            e("colon_semicolon_count", Traditional, None, f_colon_semicolon_count),
            e("quote_count", Traditional, None, f_quote_count),
            e("parenthesis_count", Traditional, None, f_parenthesis_count),
            e("hyphen_count", Traditional, None, f_hyphen_count),
            e("digit_token_count", Traditional, None, f_digit_token_count),
            e("digit_token_ratio", Traditional, None, f_digit_token_ratio),
            e("capitalized_word_ratio", Traditional, None, f_capitalized_word_ratio),
            e("all_caps_word_count", Traditional, None, f_all_caps_word_count),
            e("flesch_reading_ease_german", Traditional, None, f_flesch_reading_ease_german),
            e("wiener_sachtextformel_1", Traditional, None, f_wstf_1),
            e("wiener_sachtextformel_2", Traditional, None, f_wstf_2),
            e("wiener_sachtextformel_3", Traditional, None, f_wstf_3),
            e("wiener_sachtextformel_4", Traditional, None, f_wstf_4),
            e("type_token_ratio", Lexical, None, f_type_token_ratio),
            e("herdan_c", Lexical, None, f_herdan_c),
            e("unique_word_count", Lexical, None, f_unique_word_count),
            e("repeated_word_count", Lexical, None, f_repeated_word_count),
            e("hapax_ratio", Lexical, None, f_hapax_ratio),
            e("stopword_count", Lexical, Frequency, f_stopword_count),
            e("stopword_ratio", Lexical, Frequency, f_stopword_ratio),
            e("lexical_density", Lexical, Frequency, f_lexical_density),
            e("mean_word_log_freq", Lexical, Frequency, f_mean_word_log_freq),
            e("min_word_log_freq", Lexical, Frequency, f_min_word_log_freq),
            e("max_word_log_freq", Lexical, Frequency, f_max_word_log_freq),
            e("std_word_log_freq", Lexical, Frequency, f_std_word_log_freq),
            e("median_word_log_freq", Lexical, Frequency, f_median_word_log_freq),
            e("mean_word_rank", Lexical, Frequency, f_mean_word_rank),
            e("median_word_rank", Lexical, Frequency, f_median_word_rank),
            e("oov_count", Lexical, Frequency, f_oov_count),
            e("oov_ratio", Lexical, Frequency, f_oov_ratio),
            e("band_top100_ratio", Lexical, Frequency, f_band_top100_ratio),
            e("band_top500_ratio", Lexical, Frequency, f_band_top500_ratio),
            e("band_top1000_ratio", Lexical, Frequency, f_band_top1000_ratio),
            e("rare_word_ratio", Lexical, Frequency, f_rare_word_ratio),
            e("content_word_log_freq_mean", Lexical, Frequency, f_content_word_log_freq_mean),
            e("noun_ratio", Morphological, Tagger, f_noun_ratio),
            e("verb_ratio", Morphological, Tagger, f_verb_ratio),
            e("adjective_ratio", Morphological, Tagger, f_adjective_ratio),
            e("function_word_ratio", Morphological, Tagger, f_function_word_ratio),
            e("numeral_token_ratio", Morphological, Tagger, f_numeral_token_ratio),
            e("other_pos_ratio", Morphological, Tagger, f_other_pos_ratio),
            e("noun_count", Morphological, Tagger, f_noun_count),
            e("verb_count", Morphological, Tagger, f_verb_count),
            e("noun_verb_ratio", Morphological, Tagger, f_noun_verb_ratio),
            e("mean_noun_length_chars", Morphological, Tagger, f_mean_noun_length_chars),
            e("max_noun_length_chars", Morphological, Tagger, f_max_noun_length_chars),
            e("compound_noun_ratio", Morphological, Tagger, f_compound_noun_ratio),
            e("first_verb_position", Morphological, Tagger, f_first_verb_position),
            e("first_noun_position", Morphological, Tagger, f_first_noun_position),
            e("article_count", Morphological, Tagger, f_article_count),
            e("pronoun_count", Morphological, Tagger, f_pronoun_count),
            e("genitive_marker_count", Morphological, Tagger, f_genitive_marker_count),
            e("dative_marker_count", Morphological, Tagger, f_dative_marker_count),
            e("subordinating_conjunction_count", Morphological, Tagger, f_subordinating_conjunction_count),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn default_catalog_has_73_unique_entries() {
        let catalog = default_catalog();
        assert_eq!(catalog.len(), 73);
        let names: HashSet<_> = catalog.entries.iter().map(|e| e.name).collect();
        assert_eq!(names.len(), 73);
    }

    #[test]
    fn all_three_groups_present() {
        let catalog = default_catalog();
        let count = |g: FeatureGroup| catalog.entries.iter().filter(|e| e.group == g).count();
        assert_eq!(count(FeatureGroup::Traditional), 32);
        assert_eq!(count(FeatureGroup::Lexical), 22);
        assert_eq!(count(FeatureGroup::Morphological), 19);
    }

    fn extract_map(text: &str, resources: &Resources) -> std::collections::BTreeMap<String, Option<f64>> {
        let catalog = default_catalog();
        let stats = SentenceStats::compute(text, resources);
        catalog
            .names()
            .into_iter()
            .zip(catalog.extract_stats(&stats))
            .collect()
    }

    #[test]
    fn hand_counted_example() {
        let values = extract_map("Das ist ein Test.", &Resources::bundled());
        assert_eq!(values["word_count"], Some(4.0));
        assert_eq!(values["sentence_char_length"], Some(17.0));
        assert_eq!(values["avg_word_length_chars"], Some(3.25));
        assert_eq!(values["letter_count"], Some(13.0));
        // Das=1, ist=1, ein=1 (ei diphthong), Test=1.
        assert_eq!(values["syllable_count"], Some(4.0));
        assert_eq!(values["flesch_reading_ease_german"], Some(180.0 - 4.0 - 58.5));
        let wstf3 = values["wiener_sachtextformel_3"].unwrap();
        assert!((wstf3 - (0.1905 * 4.0 - 1.1144)).abs() < 1e-12);
    }

    #[test]
    fn disabled_frequency_list_yields_missing() {
        let resources = Resources {
            frequency: Option::None,
            tagger: Some(crate::features::tagger::Tagger::bundled()),
        };
        let values = extract_map("Das ist ein Test.", &resources);
        let catalog = default_catalog();
        for entry in &catalog.entries {
            if entry.resource == ResourceNeed::Frequency {
                assert_eq!(values[entry.name], Option::None, "{} should be MISSING", entry.name);
            }
        }
        assert!(values["word_count"].is_some());
        assert!(values["noun_ratio"].is_some());
    }

    #[test]
    fn disabled_tagger_yields_missing_morphology() {
        let resources = Resources {
            frequency: Some(crate::features::resources::FrequencyList::bundled()),
            tagger: Option::None,
        };
        let values = extract_map("Das ist ein Test.", &resources);
        let catalog = default_catalog();
        for entry in &catalog.entries {
            if entry.resource == ResourceNeed::Tagger {
                assert_eq!(values[entry.name], Option::None, "{} should be MISSING", entry.name);
            }
        }
        assert!(values["stopword_ratio"].is_some());
    }

    #[test]
    fn degenerate_sentence_leaves_ratios_missing() {
        let values = extract_map("***", &Resources::bundled());
        assert_eq!(values["word_count"], Some(0.0));
        assert_eq!(values["avg_word_length_chars"], Option::None);
        assert_eq!(values["flesch_reading_ease_german"], Option::None);
        assert_eq!(values["type_token_ratio"], Option::None);
        assert_eq!(values["punctuation_count"], Some(3.0));
    }

    #[test]
    fn noun_verb_ratio_missing_without_verbs() {
        // No token the tagger can call a verb.
        let values = extract_map("Der große Baum.", &Resources::bundled());
        assert_eq!(values["noun_verb_ratio"], Option::None);
        assert!(values["noun_count"].unwrap() >= 1.0);
    }

    #[test]
    fn extraction_is_deterministic() {
        let resources = Resources::bundled();
        let text = "Die Verfassung des Landes wurde 1949 verabschiedet, obwohl viele Fragen offen blieben.";
        let a = extract_map(text, &resources);
        let b = extract_map(text, &resources);
        assert_eq!(a, b);
    }

    #[test]
    fn subset_preserves_order_and_rejects_unknown() {
        let catalog = default_catalog();
        let subset = catalog
            .subset(&["word_count".to_string(), "sentence_char_length".to_string()])
            .unwrap();
        // Catalog order, not request order.
        assert_eq!(subset.names(), vec!["sentence_char_length", "word_count"]);
        assert!(catalog.subset(&["nope".to_string()]).is_err());
    }
}
