//! Token-length estimation.

use std::fmt;

/// Counts tokens in a piece of text.
///
/// Implementations must return 0 for the empty string and be monotone under
/// concatenation: `count(a + b) >= max(count(a), count(b))`.
pub trait Tokenizer: Send + Sync {
    fn name(&self) -> &str;
    fn count(&self, text: &str) -> usize;
}

/// Default length model: one token per four characters, rounded up.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HeuristicTokenizer;

pub const CHARS_PER_TOKEN: usize = 4;

impl HeuristicTokenizer {
    pub const NAME: &'static str = "heuristic-chars4";

    /// Tokens for a known character count.
    pub fn tokens_for_chars(chars: usize) -> usize {
        chars.div_ceil(CHARS_PER_TOKEN)
    }
}

impl Tokenizer for HeuristicTokenizer {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn count(&self, text: &str) -> usize {
        Self::tokens_for_chars(text.chars().count())
    }
}

impl fmt::Display for dyn Tokenizer + '_ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn token_count(text: &str, tok: &dyn Tokenizer) -> usize {
    tok.count(text)
}

/// Resolves a tokenizer by its configuration name.
pub fn tokenizer_by_name(name: &str) -> Option<Box<dyn Tokenizer>> {
    match name {
        "heuristic" | "heuristic-chars4" => Some(Box::new(HeuristicTokenizer)),
        _ => None,
    }
}
