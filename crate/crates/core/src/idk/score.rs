//! Multiple-choice scoring with textual abstentions.

use std::sync::LazyLock;

use regex::Regex;

/// Case-insensitive phrases that count as "I don't know".
pub const ABSTENTION_PATTERNS: &[&str] = &[
    "i don't know",
    "i do not know",
    "cannot be determined",
    "not provided",
    "not mentioned",
    "insufficient information",
    "does not specify",
    "not specified",
    "does not say",
    "not stated",
];

static LETTER_FORM: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\(([ABCD])\)|Answer:\s*\(?([ABCD])\b").unwrap());
static BARE_LETTER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\(?([ABCD])[).:]?$").unwrap());

fn normalize(s: &str) -> String {
    s.trim()
        .trim_end_matches('.')
        .replace(['\u{2019}', '\u{2018}'], "'")
        .to_lowercase()
}

/// Choice letter named by the output, if any.
pub fn extract_choice(raw: &str, choices: &[String]) -> Option<char> {
    if let Some(c) = LETTER_FORM.captures(raw) {
        let m = c.get(1).or_else(|| c.get(2)).unwrap();
        return m.as_str().chars().next();
    }
    let trimmed = raw.trim();
    if let Some(c) = BARE_LETTER.captures(trimmed) {
        return c[1].chars().next();
    }
    let norm = normalize(trimmed);
    choices
        .iter()
        .position(|c| normalize(c) == norm)
        .and_then(|i| ['A', 'B', 'C', 'D'].get(i).copied())
}

pub fn is_abstention(raw: &str) -> bool {
    let norm = normalize(raw);
    ABSTENTION_PATTERNS.iter().any(|p| norm.contains(p))
}

pub fn idk_score(raw: &str, truth_choice: char, choices: &[String]) -> f64 {
    match extract_choice(raw, choices) {
        Some(c) => (c == truth_choice) as u8 as f64,
        None if truth_choice == 'D' && is_abstention(raw) => 1.0,
        None => 0.0,
    }
}

/// A uniform guess over four choices.
pub fn idk_chance_rate() -> f64 {
    0.25
}
