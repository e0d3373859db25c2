//! The list-operation mini-language: operations, views and the interpreter.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const INITIAL_LIST: [i64; 6] = [1, 2, 3, 4, 5, 6];
pub const VALUE_MIN: i64 = -4000;
pub const VALUE_MAX: i64 = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ListOp {
    Append(i64),
    Insert(i64, i64),
    Pop(i64),
    Remove(i64),
    Sort,
    Reverse,
    PrintDoNothing,
}

impl ListOp {
    pub fn changes_length(self) -> bool {
        matches!(
            self,
            ListOp::Append(_) | ListOp::Insert(..) | ListOp::Pop(_) | ListOp::Remove(_)
        )
    }

    /// Whether the op can execute at a list of the given contents.
    pub fn is_valid_at(self, state: &[i64]) -> bool {
        match self {
            ListOp::Pop(i) => resolve_index(i, state.len()).is_some(),
            ListOp::Remove(v) => state.contains(&v),
            _ => true,
        }
    }
}

impl fmt::Display for ListOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ListOp::Append(v) => write!(f, "a.append({v})"),
            ListOp::Insert(i, v) => write!(f, "a.insert({i}, {v})"),
            ListOp::Pop(i) => write!(f, "a.pop({i})"),
            ListOp::Remove(v) => write!(f, "a.remove({v})"),
            ListOp::Sort => f.write_str("a.sort()"),
            ListOp::Reverse => f.write_str("a.reverse()"),
            ListOp::PrintDoNothing => f.write_str("print(\"Do nothing.\")"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViewKind {
    Print,
    Sum,
    Min,
    Max,
    Len,
}

impl ViewKind {
    pub const ALL: [ViewKind; 5] = [
        ViewKind::Print,
        ViewKind::Sum,
        ViewKind::Min,
        ViewKind::Max,
        ViewKind::Len,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ViewKind::Print => "print",
            ViewKind::Sum => "sum",
            ViewKind::Min => "min",
            ViewKind::Max => "max",
            ViewKind::Len => "len",
        }
    }

    pub fn parse(s: &str) -> Option<ViewKind> {
        ViewKind::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for ViewKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Final query over the list. Slices are half-open `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ViewOp {
    PrintSlice(usize, usize),
    SumSlice(usize, usize),
    MinSlice(usize, usize),
    MaxSlice(usize, usize),
    Len,
}

impl ViewOp {
    pub fn kind(self) -> ViewKind {
        match self {
            ViewOp::PrintSlice(..) => ViewKind::Print,
            ViewOp::SumSlice(..) => ViewKind::Sum,
            ViewOp::MinSlice(..) => ViewKind::Min,
            ViewOp::MaxSlice(..) => ViewKind::Max,
            ViewOp::Len => ViewKind::Len,
        }
    }

    pub fn slice(self) -> Option<(usize, usize)> {
        match self {
            ViewOp::PrintSlice(lo, hi)
            | ViewOp::SumSlice(lo, hi)
            | ViewOp::MinSlice(lo, hi)
            | ViewOp::MaxSlice(lo, hi) => Some((lo, hi)),
            ViewOp::Len => None,
        }
    }

    pub fn new(kind: ViewKind, lo: usize, hi: usize) -> ViewOp {
        match kind {
            ViewKind::Print => ViewOp::PrintSlice(lo, hi),
            ViewKind::Sum => ViewOp::SumSlice(lo, hi),
            ViewKind::Min => ViewOp::MinSlice(lo, hi),
            ViewKind::Max => ViewOp::MaxSlice(lo, hi),
            ViewKind::Len => ViewOp::Len,
        }
    }
}

impl fmt::Display for ViewOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.slice() {
            Some((lo, hi)) => write!(f, "{}(a[{lo}:{hi}])", self.kind()),
            None => f.write_str("len(a)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ListAnswer {
    Text(String),
    Number(i64),
}

impl fmt::Display for ListAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ListAnswer::Text(s) => f.write_str(s),
            ListAnswer::Number(n) => write!(f, "{n}"),
        }
    }
}

/// Canonical `[a, b, c]` rendering.
pub fn render_list(values: &[i64]) -> String {
    let mut out = String::with_capacity(values.len() * 6 + 2);
    out.push('[');
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&v.to_string());
    }
    out.push(']');
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramOp {
    pub op: ListOp,
    pub relevant: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListProgram {
    pub initial: Vec<i64>,
    pub ops: Vec<ProgramOp>,
    pub view: ViewOp,
}

impl ListProgram {
    pub fn complexity(&self) -> usize {
        self.ops.iter().filter(|o| o.relevant).count()
    }

    pub fn relevant_positions(&self) -> Vec<usize> {
        self.ops
            .iter()
            .enumerate()
            .filter(|(_, o)| o.relevant)
            .map(|(i, _)| i)
            .collect()
    }

    /// The program with every filler op removed.
    pub fn without_filler(&self) -> ListProgram {
        ListProgram {
            initial: self.initial.clone(),
            ops: self.ops.iter().copied().filter(|o| o.relevant).collect(),
            view: self.view,
        }
    }

    /// The program with the op at `pos` removed.
    pub fn without(&self, pos: usize) -> ListProgram {
        let mut ops = self.ops.clone();
        ops.remove(pos);
        ListProgram {
            initial: self.initial.clone(),
            ops,
            view: self.view,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ListError {
    #[error("invalid operation {op} at state of length {}", .state.len())]
    InvalidOp { op: ListOp, state: Vec<i64> },
    #[error("{view} evaluated over an empty slice")]
    EmptySliceExtremum { view: ViewOp },
}

fn resolve_index(i: i64, len: usize) -> Option<usize> {
    let len = len as i64;
    let idx = if i < 0 { i + len } else { i };
    (0..len).contains(&idx).then_some(idx as usize)
}

fn clamp_insert_index(i: i64, len: usize) -> usize {
    let len = len as i64;
    let idx = if i < 0 { (i + len).max(0) } else { i.min(len) };
    idx as usize
}

/// Applies one operation in place.
pub fn apply_op_in_place(state: &mut Vec<i64>, op: ListOp) -> Result<(), ListError> {
    match op {
        ListOp::Append(v) => state.push(v),
        ListOp::Insert(i, v) => {
            let idx = clamp_insert_index(i, state.len());
            state.insert(idx, v);
        }
        ListOp::Pop(i) => match resolve_index(i, state.len()) {
            Some(idx) => {
                state.remove(idx);
            }
            None => {
                return Err(ListError::InvalidOp {
                    op,
                    state: state.clone(),
                })
            }
        },
        ListOp::Remove(v) => match state.iter().position(|&x| x == v) {
            Some(idx) => {
                state.remove(idx);
            }
            None => {
                return Err(ListError::InvalidOp {
                    op,
                    state: state.clone(),
                })
            }
        },
        ListOp::Sort => state.sort_unstable(),
        ListOp::Reverse => state.reverse(),
        ListOp::PrintDoNothing => {}
    }
    Ok(())
}

pub fn apply_op(state: &[i64], op: ListOp) -> Result<Vec<i64>, ListError> {
    let mut next = state.to_vec();
    apply_op_in_place(&mut next, op)?;
    Ok(next)
}

fn clamped(state: &[i64], lo: usize, hi: usize) -> &[i64] {
    let hi = hi.min(state.len());
    let lo = lo.min(hi);
    &state[lo..hi]
}

pub fn eval_view(state: &[i64], view: ViewOp) -> Result<ListAnswer, ListError> {
    Ok(match view {
        ViewOp::PrintSlice(lo, hi) => ListAnswer::Text(render_list(clamped(state, lo, hi))),
        ViewOp::SumSlice(lo, hi) => ListAnswer::Number(clamped(state, lo, hi).iter().sum()),
        ViewOp::MinSlice(lo, hi) => ListAnswer::Number(
            *clamped(state, lo, hi)
                .iter()
                .min()
                .ok_or(ListError::EmptySliceExtremum { view })?,
        ),
        ViewOp::MaxSlice(lo, hi) => ListAnswer::Number(
            *clamped(state, lo, hi)
                .iter()
                .max()
                .ok_or(ListError::EmptySliceExtremum { view })?,
        ),
        ViewOp::Len => ListAnswer::Number(state.len() as i64),
    })
}

/// Final list contents after all ops.
pub fn final_state(
    initial: &[i64],
    ops: impl IntoIterator<Item = ListOp>,
) -> Result<Vec<i64>, ListError> {
    let mut state = initial.to_vec();
    for op in ops {
        apply_op_in_place(&mut state, op)?;
    }
    Ok(state)
}

pub fn run_program(prog: &ListProgram) -> Result<ListAnswer, ListError> {
    let state = final_state(&prog.initial, prog.ops.iter().map(|o| o.op))?;
    eval_view(&state, prog.view)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn remove_first_occurrence() {
        assert_eq!(
            apply_op(&INITIAL_LIST, ListOp::Remove(3)).unwrap(),
            vec![1, 2, 4, 5, 6]
        );
        assert_eq!(apply_op(&[7, 1, 7], ListOp::Remove(7)).unwrap(), vec![1, 7]);
    }

    #[test]
    fn insert_before_position() {
        assert_eq!(
            apply_op(&[1, 2, 4, 5, 6], ListOp::Insert(2, 325)).unwrap(),
            vec![1, 2, 325, 4, 5, 6]
        );
    }

    #[test]
    fn insert_clamps() {
        assert_eq!(
            apply_op(&[1, 2], ListOp::Insert(10, 9)).unwrap(),
            vec![1, 2, 9]
        );
        assert_eq!(
            apply_op(&[1, 2], ListOp::Insert(-1, 9)).unwrap(),
            vec![1, 9, 2]
        );
        assert_eq!(
            apply_op(&[1, 2], ListOp::Insert(-10, 9)).unwrap(),
            vec![9, 1, 2]
        );
    }

    #[test]
    fn sort_then_reverse_twice() {
        let s = apply_op(&[3, 1, 2], ListOp::Sort).unwrap();
        assert_eq!(s, vec![1, 2, 3]);
        let r = apply_op(&s, ListOp::Reverse).unwrap();
        assert_eq!(r, vec![3, 2, 1]);
        assert_eq!(apply_op(&r, ListOp::Reverse).unwrap(), vec![1, 2, 3]);
    }

    #[test]
    fn invalid_ops_are_errors() {
        assert!(matches!(
            apply_op(&[1], ListOp::Pop(1)),
            Err(ListError::InvalidOp { .. })
        ));
        assert!(matches!(
            apply_op(&[], ListOp::Pop(-1)),
            Err(ListError::InvalidOp { .. })
        ));
        assert!(matches!(
            apply_op(&[1], ListOp::Remove(2)),
            Err(ListError::InvalidOp { .. })
        ));
        assert_eq!(apply_op(&[1, 2, 3], ListOp::Pop(-1)).unwrap(), vec![1, 2]);
    }

    #[test]
    fn view_examples() {
        assert_eq!(
            eval_view(&[1, 2, 325, 4, 5, 6], ViewOp::MinSlice(2, 4)).unwrap(),
            ListAnswer::Number(4)
        );
        assert_eq!(
            eval_view(&[1, 2, 3], ViewOp::SumSlice(5, 9)).unwrap(),
            ListAnswer::Number(0)
        );
        assert_eq!(
            eval_view(&[1, 2, 325], ViewOp::PrintSlice(0, 3)).unwrap(),
            ListAnswer::Text("[1, 2, 325]".into())
        );
        assert_eq!(
            eval_view(&[1, 2, 3], ViewOp::PrintSlice(2, 1)).unwrap(),
            ListAnswer::Text("[]".into())
        );
        assert_eq!(
            eval_view(&[1, 2, 3], ViewOp::MaxSlice(3, 5)),
            Err(ListError::EmptySliceExtremum {
                view: ViewOp::MaxSlice(3, 5)
            })
        );
        assert_eq!(
            eval_view(&[1, 2, 3], ViewOp::Len).unwrap(),
            ListAnswer::Number(3)
        );
    }

    #[test]
    fn program_examples() {
        let prog = ListProgram {
            initial: INITIAL_LIST.to_vec(),
            ops: vec![
                ProgramOp {
                    op: ListOp::Remove(3),
                    relevant: true,
                },
                ProgramOp {
                    op: ListOp::PrintDoNothing,
                    relevant: false,
                },
                ProgramOp {
                    op: ListOp::Insert(2, 325),
                    relevant: true,
                },
            ],
            view: ViewOp::MinSlice(2, 4),
        };
        assert_eq!(run_program(&prog).unwrap(), ListAnswer::Number(4));
        assert_eq!(prog.complexity(), 2);
        let empty = ListProgram {
            initial: INITIAL_LIST.to_vec(),
            ops: vec![],
            view: ViewOp::Len,
        };
        assert_eq!(run_program(&empty).unwrap(), ListAnswer::Number(6));
        let filler = ListProgram {
            initial: INITIAL_LIST.to_vec(),
            ops: [
                ListOp::PrintDoNothing,
                ListOp::Reverse,
                ListOp::Reverse,
                ListOp::Append(9),
                ListOp::Remove(9),
            ]
            .into_iter()
            .map(|op| ProgramOp {
                op,
                relevant: false,
            })
            .collect(),
            view: ViewOp::PrintSlice(0, 6),
        };
        assert_eq!(
            run_program(&filler).unwrap(),
            ListAnswer::Text("[1, 2, 3, 4, 5, 6]".into())
        );
    }

    #[test]
    fn rendering_matches_prompt_syntax() {
        assert_eq!(ListOp::Insert(3, 3129).to_string(), "a.insert(3, 3129)");
        assert_eq!(ListOp::Append(-4610).to_string(), "a.append(-4610)");
        assert_eq!(ListOp::PrintDoNothing.to_string(), "print(\"Do nothing.\")");
        assert_eq!(ViewOp::MinSlice(2, 4).to_string(), "min(a[2:4])");
        assert_eq!(ViewOp::Len.to_string(), "len(a)");
    }

    proptest! {
        #[test]
        fn sort_idempotent(v in prop::collection::vec(-4000i64..=4000, 0..40)) {
            let once = apply_op(&v, ListOp::Sort).unwrap();
            prop_assert_eq!(apply_op(&once, ListOp::Sort).unwrap(), once);
        }

        #[test]
        fn double_reverse_identity(v in prop::collection::vec(-4000i64..=4000, 0..40)) {
            let r = apply_op(&apply_op(&v, ListOp::Reverse).unwrap(), ListOp::Reverse).unwrap();
            prop_assert_eq!(r, v);
        }

        #[test]
        fn do_nothing_is_identity(v in prop::collection::vec(-4000i64..=4000, 0..40)) {
            prop_assert_eq!(apply_op(&v, ListOp::PrintDoNothing).unwrap(), v);
        }
    }
}
