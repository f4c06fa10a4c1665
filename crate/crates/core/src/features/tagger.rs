//! Heuristic German part-of-speech tagging.
//!
//! A shallow rule cascade: closed-class lookup, then German noun
//! capitalization, then suffix heuristics. Good enough for ratio features;
//! not a linguistic analysis. A custom function-word list can be loaded
//! from a file; the suffix rules are fixed.

use std::collections::HashSet;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PosTag {
    Noun,
    Verb,
    Adjective,
    Function,
    Numeral,
    Other,
}

/// Articles, pronouns, prepositions, conjunctions, common adverbs and
/// auxiliary forms: the closed classes the cascade checks first.
const FUNCTION_WORDS: &[&str] = &[
    "aber", "alle", "allem", "allen", "aller", "alles", "als", "also", "am", "an", "andere",
    "anderen", "anderer", "anderes", "auch", "auf", "aus", "bei", "beim", "bevor", "bin", "bis",
    "bist", "da", "dabei", "dadurch", "dafür", "damit", "danach", "dann", "daran", "darauf",
    "darin", "das", "dass", "davon", "dazu", "dein", "deine", "deinem", "deinen", "deiner",
    "deines", "dem", "den", "denen", "denn", "der", "deren", "des", "deshalb", "dessen", "dich",
    "die", "dies", "diese", "diesem", "diesen", "dieser", "dieses", "dir", "doch", "dort", "du",
    "durch", "ein", "eine", "einem", "einen", "einer", "eines", "er", "es", "etwas", "euch",
    "euer", "eure", "eurem", "euren", "eurer", "eures", "falls", "für", "gegen", "hast", "hat",
    "hatte", "hatten", "hier", "hinter", "ich", "ihm", "ihn", "ihnen", "ihr", "ihre", "ihrem",
    "ihren", "ihrer", "ihres", "im", "in", "indem", "ins", "ist", "ja", "je", "jede", "jedem",
    "jeden", "jeder", "jedes", "jedoch", "jene", "jenem", "jenen", "jener", "jenes", "kein",
    "keine", "keinem", "keinen", "keiner", "keines", "man", "mein", "meine", "meinem", "meinen",
    "meiner", "meines", "mich", "mir", "mit", "nach", "nachdem", "neben", "nein", "nicht",
    "nichts", "noch", "nun", "nur", "ob", "obwohl", "oder", "ohne", "schon", "sehr", "sein",
    "seine", "seinem", "seinen", "seiner", "seines", "seit", "seitdem", "sich", "sie", "sind",
    "so", "sobald", "sodass", "sofern", "solange", "sondern", "sowie", "über", "um", "und",
    "uns", "unser", "unsere", "unserem", "unseren", "unserer", "unseres", "unter", "vom", "von",
    "vor", "während", "war", "waren", "warst", "was", "weil", "welche", "welchem", "welchen",
    "welcher", "welches", "wenn", "wer", "wie", "wieder", "wir", "wird", "wirst", "wo", "zu",
    "zum", "zur", "zwar", "zwischen",
];

const NUMERAL_WORDS: &[&str] = &[
    "null", "eins", "zwei", "drei", "vier", "fünf", "sechs", "sieben", "acht", "neun", "zehn",
    "elf", "zwölf", "dreizehn", "vierzehn", "fünfzehn", "sechzehn", "siebzehn", "achtzehn",
    "neunzehn", "zwanzig", "dreißig", "vierzig", "fünfzig", "sechzig", "siebzig", "achtzig",
    "neunzig", "hundert", "tausend", "million", "millionen", "milliarde", "milliarden",
];

const NOUN_SUFFIXES: &[&str] = &[
    "ung", "heit", "keit", "schaft", "tion", "tät", "nis", "tum", "chen", "lein", "ment", "ismus",
];

const ADJECTIVE_SUFFIXES: &[&str] = &[
    "ig", "lich", "isch", "bar", "sam", "haft", "los", "voll", "iger", "igen", "igem", "ige",
    "licher", "lichen", "lichem", "liche", "ischer", "ischen", "ischem", "ische",
];

const VERB_SUFFIXES: &[&str] = &["en", "st", "t", "te", "ten", "tet", "est", "et", "eln", "ern"];

/// Definite and indefinite article forms.
pub const ARTICLES: &[&str] = &[
    "der", "die", "das", "den", "dem", "des", "ein", "eine", "einen", "einem", "einer", "eines",
];

/// Personal pronouns (nominative, accusative, dative).
pub const PERSONAL_PRONOUNS: &[&str] = &[
    "ich", "du", "er", "sie", "es", "wir", "ihr", "mich", "dich", "ihn", "uns", "euch", "mir",
    "dir", "ihm", "ihnen",
];

/// Genitive-signaling determiner forms.
pub const GENITIVE_MARKERS: &[&str] = &[
    "des", "eines", "meines", "deines", "seines", "ihres", "unseres", "eures", "keines", "dessen",
    "deren",
];

/// Dative-signaling determiner forms.
pub const DATIVE_MARKERS: &[&str] = &[
    "dem", "einem", "meinem", "deinem", "seinem", "ihrem", "unserem", "eurem", "keinem",
];

/// Conjunctions that open a subordinate clause.
pub const SUBORDINATING_CONJUNCTIONS: &[&str] = &[
    "dass", "weil", "ob", "obwohl", "während", "nachdem", "bevor", "damit", "sodass", "falls",
    "sofern", "seitdem", "solange", "sobald", "indem", "wenngleich",
];

#[derive(Debug, Clone)]
pub struct Tagger {
    function_words: HashSet<String>,
}

impl Tagger {
    pub fn bundled() -> Self {
        Tagger {
            function_words: FUNCTION_WORDS.iter().map(|w| w.to_string()).collect(),
        }
    }

    /// Replace the function-word list with one loaded from a file (one word
    /// per line, `#` comments); the suffix cascade stays built in.
    pub fn from_word_list(path: impl AsRef<Path>) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let function_words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.to_lowercase())
            .collect();
        Ok(Tagger { function_words })
    }

    pub fn tag_word(&self, word: &str, is_first: bool) -> PosTag {
        let lower = word.to_lowercase();
        if NUMERAL_WORDS.contains(&lower.as_str()) || word.chars().all(|c| c.is_numeric()) {
            return PosTag::Numeral;
        }
        if self.function_words.contains(&lower) {
            return PosTag::Function;
        }
        let capitalized = word.chars().next().is_some_and(|c| c.is_uppercase());
        if capitalized && !is_first {
            return PosTag::Noun;
        }
        if NOUN_SUFFIXES.iter().any(|s| lower.ends_with(s)) && capitalized {
            return PosTag::Noun;
        }
        if ADJECTIVE_SUFFIXES.iter().any(|s| lower.ends_with(s)) {
            return PosTag::Adjective;
        }
        if !capitalized && VERB_SUFFIXES.iter().any(|s| lower.ends_with(s)) {
            return PosTag::Verb;
        }
        if capitalized {
            // Sentence-initial and no closed-class or suffix evidence:
            // German capitalization alone cannot decide, default to noun.
            return PosTag::Noun;
        }
        PosTag::Other
    }

    pub fn tag_words(&self, words: &[String]) -> Vec<PosTag> {
        words
            .iter()
            .enumerate()
            .map(|(i, w)| self.tag_word(w, i == 0))
            .collect()
    }
}

/// Case-insensitive membership count against a marker list.
pub fn count_in(words: &[String], set: &[&str]) -> usize {
    words
        .iter()
        .filter(|w| set.contains(&w.to_lowercase().as_str()))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tag_sentence(text: &str) -> Vec<(String, PosTag)> {
        let toks = crate::features::text::tokenize(text);
        let tags = Tagger::bundled().tag_words(&toks.words);
        toks.words.into_iter().zip(tags).collect()
    }

    #[test]
    fn capitalized_non_initial_words_are_nouns() {
        let tagged = tag_sentence("Der Hund läuft schnell.");
        assert_eq!(tagged[0].1, PosTag::Function);
        assert_eq!(tagged[1].1, PosTag::Noun);
        assert_eq!(tagged[2].1, PosTag::Verb);
    }

    #[test]
    fn suffix_rules_classify_adjectives_and_verbs() {
        let tagged = tag_sentence("Das ist eine freundliche Lösung und wir lachen.");
        let by_word: std::collections::HashMap<_, _> = tagged.into_iter().collect();
        assert_eq!(by_word["freundliche"], PosTag::Adjective);
        assert_eq!(by_word["Lösung"], PosTag::Noun);
        assert_eq!(by_word["lachen"], PosTag::Verb);
    }

    #[test]
    fn numerals_and_digits() {
        let tagger = Tagger::bundled();
        assert_eq!(tagger.tag_word("zwölf", false), PosTag::Numeral);
        assert_eq!(tagger.tag_word("1990", false), PosTag::Numeral);
    }

    #[test]
    fn sentence_initial_function_word_not_a_noun() {
        let tagger = Tagger::bundled();
        assert_eq!(tagger.tag_word("Das", true), PosTag::Function);
        assert_eq!(tagger.tag_word("Regierung", true), PosTag::Noun);
    }

    #[test]
    fn marker_counts() {
        let toks = crate::features::text::tokenize("Der Hut des Mannes liegt auf dem Tisch, weil er ihn dort vergaß.");
        assert_eq!(count_in(&toks.words, GENITIVE_MARKERS), 1);
        assert_eq!(count_in(&toks.words, DATIVE_MARKERS), 1);
        assert_eq!(count_in(&toks.words, SUBORDINATING_CONJUNCTIONS), 1);
        assert!(count_in(&toks.words, ARTICLES) >= 2);
    }

    #[test]
    fn custom_word_list_replaces_function_words() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fw.txt");
        std::fs::write(&path, "blorp\n").unwrap();
        let tagger = Tagger::from_word_list(&path).unwrap();
        assert_eq!(tagger.tag_word("blorp", false), PosTag::Function);
        // "der" is no longer in the custom closed-class list.
        assert_ne!(tagger.tag_word("der", false), PosTag::Function);
    }
}
