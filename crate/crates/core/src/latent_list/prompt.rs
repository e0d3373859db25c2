//! Few-shot prompt rendering and parsing for the list task.

use std::fmt::Write as _;

use regex::Regex;
use std::sync::OnceLock;
use thiserror::Error;

use super::program::{
    eval_view, final_state, render_list, ListAnswer, ListOp, ViewKind, ViewOp, INITIAL_LIST,
};

pub const HEADER: &str = "Pretend to be a Python interpreter. You will see a sequence of updates which correspond to list operations. Here are some examples.";
pub const SEPARATOR: &str = "===================";

/// Worked examples shown before the query, with the slice each one views.
pub const EXAMPLE_1_OPS: [ListOp; 8] = [
    ListOp::Pop(0),
    ListOp::Pop(4),
    ListOp::Remove(3),
    ListOp::Sort,
    ListOp::Sort,
    ListOp::Append(1729),
    ListOp::Sort,
    ListOp::Append(1273),
];
pub const EXAMPLE_1_SLICE: (usize, usize) = (1, 3);

pub const EXAMPLE_2_OPS: [ListOp; 8] = [
    ListOp::Insert(3, 3129),
    ListOp::Pop(2),
    ListOp::Append(-4610),
    ListOp::Remove(2),
    ListOp::Sort,
    ListOp::Reverse,
    ListOp::Reverse,
    ListOp::Sort,
];
pub const EXAMPLE_2_SLICE: (usize, usize) = (1, 2);

fn example_answer(ops: &[ListOp], slice: (usize, usize), kind: ViewKind) -> ListAnswer {
    let view = ViewOp::new(kind, slice.0, slice.1);
    let state = final_state(&INITIAL_LIST, ops.iter().copied()).expect("worked examples are valid");
    eval_view(&state, view).expect("worked example slices are non-empty")
}

fn view_line(kind: ViewKind, slice: (usize, usize)) -> String {
    match kind {
        ViewKind::Len => "len(a)".to_owned(),
        k => format!("{k}(a[{}:{}])", slice.0, slice.1),
    }
}

fn push_example(out: &mut String, n: usize, ops: &[ListOp], slice: (usize, usize), kind: ViewKind) {
    let _ = writeln!(out, "{SEPARATOR}");
    let _ = writeln!(out, " Example {n}:");
    out.push_str(" \n");
    let _ = writeln!(out, "  >> a = {}", render_list(&INITIAL_LIST));
    for op in ops {
        let _ = writeln!(out, "  >> {op}");
    }
    let _ = writeln!(out, "  >> {}", view_line(kind, slice));
    let _ = writeln!(out, "  Output: {}", example_answer(ops, slice, kind));
    out.push('\n');
}

/// Renders the full prompt: header, two worked examples, then the query
/// program ending with a bare `Output:` cue.
pub fn render_prompt(ops: &[ListOp], view: ViewOp) -> String {
    // ~18 bytes per rendered op line.
    let mut out = String::with_capacity(1024 + ops.len() * 20);
    out.push_str(HEADER);
    out.push('\n');
    push_example(&mut out, 1, &EXAMPLE_1_OPS, EXAMPLE_1_SLICE, view.kind());
    push_example(&mut out, 2, &EXAMPLE_2_OPS, EXAMPLE_2_SLICE, view.kind());
    let _ = writeln!(out, "{SEPARATOR}");
    out.push_str(" Example 3:\n\n");
    let _ = writeln!(out, "  >> a = {}", render_list(&INITIAL_LIST));
    for op in ops {
        out.push_str("  >> ");
        let _ = write!(out, "{op}");
        out.push('\n');
    }
    let _ = writeln!(out, "  >> {view}");
    out.push_str("  Output:");
    out.push('\n');
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PromptParseError {
    #[error("query section not found")]
    MissingQuery,
    #[error("line {line}: unrecognised statement {text:?}")]
    BadStatement { line: usize, text: String },
    #[error("query has no view statement")]
    MissingView,
}

fn op_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r#"^(?:a\.append\((-?\d+)\)|a\.insert\((-?\d+), (-?\d+)\)|a\.pop\((-?\d+)\)|a\.remove\((-?\d+)\)|a\.(sort)\(\)|a\.(reverse)\(\)|(print)\("Do nothing\."\))$"#,
        )
        .unwrap()
    })
}

fn view_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"^(?:(print|sum|min|max)\(a\[(\d+):(\d+)\]\)|(len)\(a\))$").unwrap()
    })
}

pub fn parse_op(text: &str) -> Option<ListOp> {
    let c = op_regex().captures(text)?;
    let num = |i: usize| c.get(i).and_then(|m| m.as_str().parse::<i64>().ok());
    if let Some(v) = num(1) {
        return Some(ListOp::Append(v));
    }
    if let (Some(i), Some(v)) = (num(2), num(3)) {
        return Some(ListOp::Insert(i, v));
    }
    if let Some(i) = num(4) {
        return Some(ListOp::Pop(i));
    }
    if let Some(v) = num(5) {
        return Some(ListOp::Remove(v));
    }
    if c.get(6).is_some() {
        return Some(ListOp::Sort);
    }
    if c.get(7).is_some() {
        return Some(ListOp::Reverse);
    }
    c.get(8).map(|_| ListOp::PrintDoNothing)
}

pub fn parse_view(text: &str) -> Option<ViewOp> {
    let c = view_regex().captures(text)?;
    if c.get(4).is_some() {
        return Some(ViewOp::Len);
    }
    let lo = c.get(2)?.as_str().parse().ok()?;
    let hi = c.get(3)?.as_str().parse().ok()?;
    Some(ViewOp::new(ViewKind::parse(c.get(1)?.as_str())?, lo, hi))
}

/// Recovers the query program (ops after the initial assignment, and the
/// view) from a rendered prompt.
pub fn parse_query_program(prompt: &str) -> Result<(Vec<ListOp>, ViewOp), PromptParseError> {
    let start = prompt
        .rfind(" Example 3:")
        .ok_or(PromptParseError::MissingQuery)?;
    let line_offset = prompt[..start].lines().count();
    let mut ops = Vec::new();
    let mut view = None;
    let mut seen_init = false;
    for (i, line) in prompt[start..].lines().enumerate() {
        let Some(stmt) = line.strip_prefix("  >> ") else {
            continue;
        };
        if !seen_init {
            seen_init = stmt.starts_with("a = ");
            if seen_init {
                continue;
            }
        }
        if view.is_some() {
            return Err(PromptParseError::BadStatement {
                line: line_offset + i + 1,
                text: stmt.into(),
            });
        }
        if let Some(op) = parse_op(stmt) {
            ops.push(op);
        } else if let Some(v) = parse_view(stmt) {
            view = Some(v);
        } else {
            return Err(PromptParseError::BadStatement {
                line: line_offset + i + 1,
                text: stmt.into(),
            });
        }
    }
    Ok((ops, view.ok_or(PromptParseError::MissingView)?))
}
