//! Optional extraction resources: the word-frequency list and the
//! part-of-speech tagger. A disabled or unloadable resource is legal; the
//! features that need it yield MISSING instead of failing.

use crate::features::tagger::Tagger;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::{Path, PathBuf};

const BUNDLED_FREQUENCY_LIST: &str = include_str!("../../resources/de_frequency.txt");

/// Ranked word-frequency list. Rank 1 is the most frequent word; lookups
/// are case-insensitive. Log frequencies are synthesized from rank under a
/// Zipf model, so a list file only needs ordered words.
#[derive(Debug, Clone)]
pub struct FrequencyList {
    ranks: HashMap<String, usize>,
    len: usize,
}

/// Words at most this rank count as stopwords.
pub const STOPWORD_MAX_RANK: usize = 100;

impl FrequencyList {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_FREQUENCY_LIST)
    }

    pub fn from_path(path: impl AsRef<Path>) -> std::io::Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    /// One word per line, most frequent first; `#` lines are comments.
    /// Duplicate words keep their first (best) rank.
    fn parse(text: &str) -> Self {
        let mut ranks = HashMap::new();
        let mut rank = 0;
        for line in text.lines() {
            let word = line.trim();
            if word.is_empty() || word.starts_with('#') {
                continue;
            }
            rank += 1;
            ranks.entry(word.to_lowercase()).or_insert(rank);
        }
        FrequencyList { ranks, len: rank }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// 1-based rank, or None for out-of-vocabulary words.
    pub fn rank(&self, word: &str) -> Option<usize> {
        self.ranks.get(&word.to_lowercase()).copied()
    }

    /// Natural log of a synthetic per-million frequency, Zipf over rank.
    /// OOV words get the value one rank past the end of the list.
    pub fn log_freq(&self, word: &str) -> f64 {
        let rank = self.rank(word).unwrap_or(self.len + 1);
        Self::zipf_log_freq(rank)
    }

    pub fn zipf_log_freq(rank: usize) -> f64 {
        (60_000.0 / (rank as f64).powf(1.05)).ln()
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.rank(word).is_some_and(|r| r <= STOPWORD_MAX_RANK)
    }
}

/// How one resource is sourced.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResourceSetting {
    #[default]
    Bundled,
    Disabled,
    Path(PathBuf),
}

/// Resource configuration; the default uses the bundled list and tagger.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResourceConfig {
    pub frequency_list: ResourceSetting,
    pub tagger: ResourceSetting,
}

/// Loaded resources handed to feature extraction. `None` fields mark
/// resources that are disabled; dependent features extract as MISSING.
#[derive(Debug, Clone)]
pub struct Resources {
    pub frequency: Option<FrequencyList>,
    pub tagger: Option<Tagger>,
}

impl Resources {
    pub fn bundled() -> Self {
        Resources {
            frequency: Some(FrequencyList::bundled()),
            tagger: Some(Tagger::bundled()),
        }
    }

    pub fn none() -> Self {
        Resources {
            frequency: None,
            tagger: None,
        }
    }

    pub fn from_config(config: &ResourceConfig) -> std::io::Result<Self> {
        let frequency = match &config.frequency_list {
            ResourceSetting::Bundled => Some(FrequencyList::bundled()),
            ResourceSetting::Disabled => None,
            ResourceSetting::Path(p) => Some(FrequencyList::from_path(p)?),
        };
        let tagger = match &config.tagger {
            ResourceSetting::Bundled => Some(Tagger::bundled()),
            ResourceSetting::Disabled => None,
            ResourceSetting::Path(p) => Some(Tagger::from_word_list(p)?),
        };
        Ok(Resources { frequency, tagger })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_list_is_large_and_ranked() {
        let list = FrequencyList::bundled();
        assert!(list.len() >= 1000, "bundled list has {} words", list.len());
        assert_eq!(list.rank("der"), Some(1));
        assert_eq!(list.rank("und"), Some(3));
        assert!(list.rank("der").unwrap() < list.rank("haus").unwrap());
    }

    #[test]
    fn lookups_are_case_insensitive() {
        let list = FrequencyList::bundled();
        assert_eq!(list.rank("Der"), list.rank("der"));
        assert_eq!(list.rank("HAUS"), list.rank("haus"));
    }

    #[test]
    fn oov_words_get_tail_log_freq() {
        let list = FrequencyList::bundled();
        assert_eq!(list.rank("quantenchromodynamik"), None);
        let oov = list.log_freq("quantenchromodynamik");
        assert_eq!(oov, FrequencyList::zipf_log_freq(list.len() + 1));
        assert!(oov < list.log_freq("der"));
    }

    #[test]
    fn log_freq_decreases_with_rank() {
        let list = FrequencyList::bundled();
        assert!(list.log_freq("der") > list.log_freq("zeit"));
        assert!(list.log_freq("zeit") > list.log_freq("koralle"));
    }

    #[test]
    fn stopwords_are_the_head_of_the_list() {
        let list = FrequencyList::bundled();
        assert!(list.is_stopword("der"));
        assert!(list.is_stopword("und"));
        assert!(!list.is_stopword("koralle"));
        assert!(!list.is_stopword("quantenchromodynamik"));
    }

    #[test]
    fn duplicate_lines_keep_first_rank() {
        let list = FrequencyList::parse("der\nhaus\nder\nbaum\n");
        assert_eq!(list.rank("der"), Some(1));
        assert_eq!(list.rank("baum"), Some(4));
        assert_eq!(list.len(), 4);
    }

    #[test]
    fn config_disables_resources() {
        let config = ResourceConfig {
            frequency_list: ResourceSetting::Disabled,
            tagger: ResourceSetting::Disabled,
        };
        let res = Resources::from_config(&config).unwrap();
        assert!(res.frequency.is_none());
        assert!(res.tagger.is_none());
    }

    #[test]
    fn custom_list_path_loads() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("freq.txt");
        std::fs::write(&path, "# test\nalpha\nbeta\n").unwrap();
        let config = ResourceConfig {
            frequency_list: ResourceSetting::Path(path),
            tagger: ResourceSetting::Bundled,
        };
        let res = Resources::from_config(&config).unwrap();
        assert_eq!(res.frequency.unwrap().rank("beta"), Some(2));
    }
}
