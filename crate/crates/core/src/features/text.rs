//! Tokenization and German syllable counting.
//!
//! Feature extraction normalizes text to NFC first; corpus storage keeps the
//! original bytes. Words are Unicode word-boundary segments containing at
//! least one alphabetic character; purely numeric segments are counted
//! separately; punctuation is counted per character class.

use unicode_normalization::UnicodeNormalization;
use unicode_segmentation::UnicodeSegmentation;

/// Token and character counts for one sentence, after NFC normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedSentence {
    /// Segments containing at least one alphabetic character.
    pub words: Vec<String>,
    /// Segments that are numeric (digits with optional separators).
    pub numbers: Vec<String>,
    pub char_length: usize,
    pub char_length_no_spaces: usize,
    /// All punctuation or symbol characters.
    pub punctuation: usize,
    pub commas: usize,
    pub colons_semicolons: usize,
    pub quotes: usize,
    pub parentheses: usize,
    pub hyphens: usize,
}

pub fn nfc(text: &str) -> String {
    text.nfc().collect()
}

const QUOTE_CHARS: [char; 12] = ['"', '\'', '„', '“', '”', '‚', '‘', '’', '«', '»', '‹', '›'];
const PAREN_CHARS: [char; 6] = ['(', ')', '[', ']', '{', '}'];
const HYPHEN_CHARS: [char; 4] = ['-', '–', '—', '‐'];

pub fn tokenize(text: &str) -> TokenizedSentence {
    let text = nfc(text);
    let mut toks = TokenizedSentence {
        words: Vec::new(),
        numbers: Vec::new(),
        char_length: 0,
        char_length_no_spaces: 0,
        punctuation: 0,
        commas: 0,
        colons_semicolons: 0,
        quotes: 0,
        parentheses: 0,
        hyphens: 0,
    };
    for c in text.chars() {
        toks.char_length += 1;
        if !c.is_whitespace() {
            toks.char_length_no_spaces += 1;
        }
        if !c.is_alphanumeric() && !c.is_whitespace() && !c.is_control() {
            toks.punctuation += 1;
            match c {
                ',' => toks.commas += 1,
                ':' | ';' => toks.colons_semicolons += 1,
                c if QUOTE_CHARS.contains(&c) => toks.quotes += 1,
                c if PAREN_CHARS.contains(&c) => toks.parentheses += 1,
                c if HYPHEN_CHARS.contains(&c) => toks.hyphens += 1,
                _ => {}
            }
        }
    }
    for segment in text.unicode_words() {
        if segment.chars().any(|c| c.is_alphabetic()) {
            toks.words.push(segment.to_string());
        } else {
            toks.numbers.push(segment.to_string());
        }
    }
    toks
}

/// Alphabetic characters in a token.
pub fn letters(word: &str) -> usize {
    word.chars().filter(|c| c.is_alphabetic()).count()
}

const VOWELS: [char; 9] = ['a', 'e', 'i', 'o', 'u', 'ä', 'ö', 'ü', 'y'];

const DIPHTHONGS: [(char, char); 6] = [
    ('a', 'u'),
    ('e', 'u'),
    ('ä', 'u'),
    ('e', 'i'),
    ('a', 'i'),
    ('i', 'e'),
];

/// Nuclei in one maximal vowel run: greedily consume a diphthong or a
/// single vowel, left to right. "eue" is `eu` + `e`, two nuclei.
fn run_nuclei(run: &[char]) -> usize {
    let mut at = 0;
    let mut count = 0;
    while at < run.len() {
        if at + 1 < run.len() && DIPHTHONGS.contains(&(run[at], run[at + 1])) {
            at += 2;
        } else {
            at += 1;
        }
        count += 1;
    }
    count
}

/// German syllable heuristic: vowel runs split into nuclei, so diphthongs
/// (`ei`, `au`, `eu`, `äu`, `ai`, `ie`) count once but "Feuer" still gets
/// two syllables. A word with letters but no vowel (abbreviations like
/// "km") counts as one syllable.
pub fn syllables(word: &str) -> usize {
    let mut nuclei = 0;
    let mut has_letter = false;
    let mut run: Vec<char> = Vec::new();
    for c in word.chars().flat_map(|c| c.to_lowercase()) {
        if c.is_alphabetic() {
            has_letter = true;
        }
        if VOWELS.contains(&c) {
            run.push(c);
        } else {
            nuclei += run_nuclei(&run);
            run.clear();
        }
    }
    nuclei += run_nuclei(&run);
    if nuclei == 0 && has_letter {
        1
    } else {
        nuclei
    }
}
