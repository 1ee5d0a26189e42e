//! Text metrics underlying the acceptance filter.
//!
//! All functions are pure. Definitions, fixed so results are reproducible:
//!
//! - A *token* is a maximal run of non-whitespace characters.
//! - A *word* is a token containing at least one alphabetic character.
//! - A word is *Bengali* iff at least half of its alphabetic characters lie
//!   in the Bengali Unicode block U+0980–U+09FF.
//! - Text normalization for similarity and lexical diversity is NFC plus
//!   whitespace collapse (single spaces, trimmed).
//! - Fenced code blocks (lines whose trimmed content starts with ```,
//!   toggling in/out, fence lines excluded) are stripped before the
//!   language-oriented checks so programming tasks are not penalized for
//!   containing source code.

use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    /// The text contains no word tokens.
    #[error("no_words: text has no alphabetic tokens")]
    NoWords,
    /// The text is empty after normalization.
    #[error("empty_text: text is empty after normalization")]
    EmptyText,
}

const BENGALI_BLOCK_START: char = '\u{0980}';
const BENGALI_BLOCK_END: char = '\u{09FF}';
/// Bengali danda and double danda (sentence terminators, Devanagari block).
pub const DANDA: char = '\u{0964}';
pub const DOUBLE_DANDA: char = '\u{0965}';

pub fn is_bengali_char(c: char) -> bool {
    (BENGALI_BLOCK_START..=BENGALI_BLOCK_END).contains(&c)
}

fn is_allowed_punctuation(c: char) -> bool {
    c.is_ascii_punctuation() || c == DANDA || c == DOUBLE_DANDA
}

/// Remove fenced code blocks. Fence lines themselves are removed too.
/// An unclosed fence strips everything from its opening line onward.
pub fn strip_code_blocks(text: &str) -> String {
    let mut kept = Vec::new();
    let mut in_fence = false;
    for line in text.lines() {
        if line.trim_start().starts_with("```") {
            in_fence = !in_fence;
            continue;
        }
        if !in_fence {
            kept.push(line);
        }
    }
    kept.join("\n")
}

/// NFC-normalize and collapse all whitespace runs to single spaces.
pub fn normalize_text(text: &str) -> String {
    let nfc: String = text.nfc().collect();
    nfc.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Fraction of words that are Bengali, over text with code blocks stripped.
///
/// Errors with [`MetricError::NoWords`] when no token contains an
/// alphabetic character.
pub fn bengali_word_ratio(text: &str) -> Result<f64, MetricError> {
    let stripped = strip_code_blocks(text);
    let mut words = 0u64;
    let mut bengali_words = 0u64;
    for token in stripped.split_whitespace() {
        let alphabetic = token.chars().filter(|c| c.is_alphabetic()).count();
        if alphabetic == 0 {
            continue;
        }
        let bengali = token
            .chars()
            .filter(|c| c.is_alphabetic() && is_bengali_char(*c))
            .count();
        words += 1;
        if bengali * 2 >= alphabetic {
            bengali_words += 1;
        }
    }
    if words == 0 {
        return Err(MetricError::NoWords);
    }
    Ok(bengali_words as f64 / words as f64)
}

/// True iff every character outside fenced code blocks is Bengali-block,
/// whitespace, common punctuation (ASCII plus danda), or an ASCII digit.
/// Bengali digits live inside the Bengali block and are therefore allowed.
pub fn unicode_consistency(text: &str) -> bool {
    strip_code_blocks(text).chars().all(|c| {
        is_bengali_char(c) || c.is_whitespace() || is_allowed_punctuation(c) || c.is_ascii_digit()
    })
}

fn trigram_set(chars: &[char]) -> std::collections::BTreeSet<String> {
    chars.windows(3).map(|w| w.iter().collect()).collect()
}

/// Jaccard similarity of character-trigram sets over normalized text.
///
/// Texts shorter than three characters after normalization compare by exact
/// equality (1.0 if equal, 0.0 otherwise). Errors when either text is empty
/// after normalization.
pub fn trigram_similarity(a: &str, b: &str) -> Result<f64, MetricError> {
    let a = normalize_text(a);
    let b = normalize_text(b);
    if a.is_empty() || b.is_empty() {
        return Err(MetricError::EmptyText);
    }
    let a_chars: Vec<char> = a.chars().collect();
    let b_chars: Vec<char> = b.chars().collect();
    if a_chars.len() < 3 || b_chars.len() < 3 {
        return Ok(if a == b { 1.0 } else { 0.0 });
    }
    let set_a = trigram_set(&a_chars);
    let set_b = trigram_set(&b_chars);
    let intersection = set_a.intersection(&set_b).count();
    let union = set_a.len() + set_b.len() - intersection;
    Ok(intersection as f64 / union as f64)
}

/// Strip punctuation from a token; `None` when nothing remains.
fn content_token(token: &str) -> Option<String> {
    let stripped: String = token.chars().filter(|c| !is_allowed_punctuation(*c)).collect();
    if stripped.is_empty() {
        None
    } else {
        Some(stripped)
    }
}

/// Distinct word tokens divided by total word tokens, on NFC-normalized,
/// punctuation-stripped tokens.
pub fn type_token_ratio(text: &str) -> Result<f64, MetricError> {
    let normalized = normalize_text(text);
    let mut total = 0u64;
    let mut distinct = std::collections::BTreeSet::new();
    for token in normalized.split_whitespace() {
        if let Some(word) = content_token(token) {
            total += 1;
            distinct.insert(word);
        }
    }
    if total == 0 {
        return Err(MetricError::NoWords);
    }
    Ok(distinct.len() as f64 / total as f64)
}

/// Whitespace-token count of the raw text; the quality filter's length
/// measure.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}
