//! Gestalt (Ratcliff/Obershelp) string similarity over Unicode scalar values.
//!
//! Mirrors the matching-blocks recursion of Python's `difflib.SequenceMatcher`
//! with no junk predicate. The popularity heuristic (`autojunk`) is optional:
//! when enabled, characters occurring more than `len(b) / 100 + 1` times in a
//! second sequence of at least 200 characters are excluded from seeding
//! matches, exactly as the reference implementation does.

use std::collections::{HashMap, HashSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MatchBlock {
    pub a_start: usize,
    pub b_start: usize,
    pub length: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SimilarityOptions {
    pub autojunk: bool,
}

impl SimilarityOptions {
    /// Plain longest-match recursion, no heuristics.
    pub const EXACT: SimilarityOptions = SimilarityOptions { autojunk: false };
    /// Parity with `difflib.SequenceMatcher(None, a, b)` defaults.
    pub const DIFFLIB_DEFAULT: SimilarityOptions = SimilarityOptions { autojunk: true };
}

const AUTOJUNK_MIN_LEN: usize = 200;

/// Indexed pair of sequences, ready for repeated longest-match queries.
pub struct SequenceMatcher {
    a: Vec<char>,
    b: Vec<char>,
    b2j: HashMap<char, Vec<usize>>,
}

impl SequenceMatcher {
    pub fn new(a: &str, b: &str, options: SimilarityOptions) -> Self {
        Self::from_chars(a.chars().collect(), b.chars().collect(), options)
    }

    pub fn from_chars(a: Vec<char>, b: Vec<char>, options: SimilarityOptions) -> Self {
        let mut b2j: HashMap<char, Vec<usize>> = HashMap::new();
        for (j, &c) in b.iter().enumerate() {
            b2j.entry(c).or_default().push(j);
        }
        if options.autojunk && b.len() >= AUTOJUNK_MIN_LEN {
            let ntest = b.len() / 100 + 1;
            let popular: HashSet<char> = b2j
                .iter()
                .filter(|(_, js)| js.len() > ntest)
                .map(|(c, _)| *c)
                .collect();
            b2j.retain(|c, _| !popular.contains(c));
        }
        SequenceMatcher { a, b, b2j }
    }

    /// Longest common block of `a[a_lo..a_hi]` and `b[b_lo..b_hi]`; ties go to
    /// the earliest start in `a`, then in `b`.
    pub fn longest_match(&self, a_lo: usize, a_hi: usize, b_lo: usize, b_hi: usize) -> MatchBlock {
        let (a, b) = (&self.a, &self.b);
        let (mut best_i, mut best_j, mut best_k) = (a_lo, b_lo, 0usize);
        // len_at[j + 1]: length of the match ending at (i - 1, j).
        let mut len_at = vec![0usize; b.len() + 1];
        let mut next = vec![0usize; b.len() + 1];
        let mut touched: Vec<usize> = Vec::new();
        let mut next_touched: Vec<usize> = Vec::new();
        for i in a_lo..a_hi {
            if let Some(js) = self.b2j.get(&a[i]) {
                for &j in js {
                    if j < b_lo {
                        continue;
                    }
                    if j >= b_hi {
                        break;
                    }
                    let k = len_at[j] + 1;
                    next[j + 1] = k;
                    next_touched.push(j + 1);
                    if k > best_k {
                        best_i = i + 1 - k;
                        best_j = j + 1 - k;
                        best_k = k;
                    }
                }
            }
            for &t in &touched {
                len_at[t] = 0;
            }
            std::mem::swap(&mut len_at, &mut next);
            std::mem::swap(&mut touched, &mut next_touched);
            next_touched.clear();
        }
        // Popular characters never seed a match but may extend one.
        while best_i > a_lo && best_j > b_lo && a[best_i - 1] == b[best_j - 1] {
            best_i -= 1;
            best_j -= 1;
            best_k += 1;
        }
        while best_i + best_k < a_hi
            && best_j + best_k < b_hi
            && a[best_i + best_k] == b[best_j + best_k]
        {
            best_k += 1;
        }
        MatchBlock {
            a_start: best_i,
            b_start: best_j,
            length: best_k,
        }
    }

    /// Non-overlapping blocks in increasing order of both starts.
    pub fn matching_blocks(&self) -> Vec<MatchBlock> {
        let mut queue = vec![(0, self.a.len(), 0, self.b.len())];
        let mut blocks = Vec::new();
        while let Some((a_lo, a_hi, b_lo, b_hi)) = queue.pop() {
            let m = self.longest_match(a_lo, a_hi, b_lo, b_hi);
            if m.length == 0 {
                continue;
            }
            blocks.push(m);
            if a_lo < m.a_start && b_lo < m.b_start {
                queue.push((a_lo, m.a_start, b_lo, m.b_start));
            }
            if m.a_start + m.length < a_hi && m.b_start + m.length < b_hi {
                queue.push((m.a_start + m.length, a_hi, m.b_start + m.length, b_hi));
            }
        }
        blocks.sort_by_key(|m| (m.a_start, m.b_start));
        blocks
    }

    pub fn matched_len(&self) -> usize {
        self.matching_blocks().iter().map(|m| m.length).sum()
    }

    pub fn ratio(&self) -> f64 {
        let total = self.a.len() + self.b.len();
        if total == 0 {
            return 1.0;
        }
        2.0 * self.matched_len() as f64 / total as f64
    }
}

pub fn longest_matching_block(
    a: &str,
    a_range: std::ops::Range<usize>,
    b: &str,
    b_range: std::ops::Range<usize>,
) -> MatchBlock {
    SequenceMatcher::new(a, b, SimilarityOptions::EXACT).longest_match(
        a_range.start,
        a_range.end,
        b_range.start,
        b_range.end,
    )
}

/// `2 * M / (len(a) + len(b))`, heuristics disabled. Two empty strings give 1.
pub fn similarity_ratio(a: &str, b: &str) -> f64 {
    similarity_ratio_with(a, b, SimilarityOptions::EXACT)
}

pub fn similarity_ratio_with(a: &str, b: &str, options: SimilarityOptions) -> f64 {
    SequenceMatcher::new(a, b, options).ratio()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn longest_block_examples() {
        assert_eq!(
            longest_matching_block("abcd", 0..4, "bcda", 0..4),
            MatchBlock {
                a_start: 1,
                b_start: 0,
                length: 3
            }
        );
        assert_eq!(longest_matching_block("xyz", 0..3, "abc", 0..3).length, 0);
        assert_eq!(
            longest_matching_block("aa", 0..2, "aa", 0..2),
            MatchBlock {
                a_start: 0,
                b_start: 0,
                length: 2
            }
        );
        assert_eq!(longest_matching_block("", 0..0, "abc", 0..3).length, 0);
        // Tie: "ab" occurs twice in b; earliest b start wins.
        assert_eq!(
            longest_matching_block("ab", 0..2, "xabab", 0..5),
            MatchBlock {
                a_start: 0,
                b_start: 1,
                length: 2
            }
        );
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(similarity_ratio("abc", "abc"), 1.0);
        assert_eq!(similarity_ratio("abc", "xyz"), 0.0);
        assert_eq!(similarity_ratio("abcd", "bcda"), 0.75);
        assert_eq!(similarity_ratio("", ""), 1.0);
        assert_eq!(similarity_ratio("", "a"), 0.0);
    }

    #[test]
    fn unicode_scalars() {
        assert_eq!(similarity_ratio("héllo", "héllo"), 1.0);
        assert_eq!(similarity_ratio("é", "e"), 0.0);
    }

    // Reference values from CPython 3 `difflib.SequenceMatcher(None, a, b).ratio()`.
    #[test]
    fn difflib_parity_with_autojunk() {
        let a = "Penguins waddle across the frozen shelf at dawn, their black coats glinting against the ice. Each bird carries the memory of the sea: krill, cold currents, and the long dive into blue silence. Zebra-striped shadows follow them home, quietly, over a 42km trek.";
        let b = "Flamingos wade through the salty lagoon at dusk, their pink feathers glowing against the water. Each bird carries a memory of the shore: shrimp, warm tides, and the slow march through golden reeds. Quick jackals watch them from the dunes, 17 of them in total.";
        let r = similarity_ratio_with(a, b, SimilarityOptions::DIFFLIB_DEFAULT);
        assert!((r - DIFFLIB_FOX).abs() < 1e-12, "{r}");
        let r = similarity_ratio_with(a, b, SimilarityOptions::EXACT);
        assert!((r - DIFFLIB_FOX_NOJUNK).abs() < 1e-12, "{r}");
        // Identical long strings still match fully with the heuristic on.
        assert_eq!(
            similarity_ratio_with(b, b, SimilarityOptions::DIFFLIB_DEFAULT),
            1.0
        );
    }

    const DIFFLIB_FOX: f64 = 0.019305019305019305;
    const DIFFLIB_FOX_NOJUNK: f64 = 0.4942084942084942;
}
