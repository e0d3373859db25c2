//! Answer extraction and the approximate list metric.

use super::program::{ListAnswer, ViewKind, ViewOp};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedAnswer {
    Answer(ListAnswer),
    ParseFailure,
}

impl From<ListAnswer> for ParsedAnswer {
    fn from(a: ListAnswer) -> Self {
        ParsedAnswer::Answer(a)
    }
}

fn is_integer_token(s: &str) -> bool {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

/// Pulls the answer out of a raw model response.
///
/// Uses the first non-empty line after the last `Output:` marker, or the last
/// non-empty line when there is no marker.
pub fn parse_latent_list_answer(raw: &str) -> ParsedAnswer {
    let candidate = match raw.rfind("Output:") {
        Some(pos) => raw[pos + "Output:".len()..]
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty()),
        None => raw.lines().map(str::trim).filter(|l| !l.is_empty()).last(),
    };
    let Some(text) = candidate else {
        return ParsedAnswer::ParseFailure;
    };
    if is_integer_token(text) {
        return match text.parse::<i64>() {
            Ok(n) => ParsedAnswer::Answer(ListAnswer::Number(n)),
            Err(_) => ParsedAnswer::ParseFailure,
        };
    }
    if text.starts_with('[') {
        return ParsedAnswer::Answer(ListAnswer::Text(text.to_owned()));
    }
    ParsedAnswer::ParseFailure
}

/// Score in `[0, 1]`: exact string match for print views, otherwise
/// `1 - min(1, |truth - answer| / (1e-10 + |truth|))` for integer answers and
/// 0 for anything else.
pub fn latent_list_score(answer: &ParsedAnswer, truth: &ListAnswer, view: ViewOp) -> f64 {
    score_by_kind(answer, truth, view.kind())
}

pub fn score_by_kind(answer: &ParsedAnswer, truth: &ListAnswer, kind: ViewKind) -> f64 {
    if kind == ViewKind::Print {
        return match answer {
            ParsedAnswer::Answer(a) if a.to_string() == truth.to_string() => 1.0,
            _ => 0.0,
        };
    }
    let (ParsedAnswer::Answer(ListAnswer::Number(model)), ListAnswer::Number(target)) =
        (answer, truth)
    else {
        return 0.0;
    };
    let target = *target as f64;
    let norm = target.abs();
    let err = f64::min(1.0, (target - *model as f64).abs() / (1e-10 + norm));
    1.0 - err
}
