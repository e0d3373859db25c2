//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use lsq_core::latent_list::generate::program_from_instance;
use lsq_core::latent_list::program::{ListOp, ListProgram, ProgramOp, ViewKind, ViewOp};
use lsq_core::TaskInstance;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub fn test_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Python-list semantics over the rendered source text of each statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Text(String),
    Int(i64),
    Error,
}

fn call_args<'a>(line: &'a str, name: &str) -> Option<Vec<&'a str>> {
    let rest = line
        .strip_prefix(name)?
        .strip_prefix('(')?
        .strip_suffix(')')?;
    Some(if rest.is_empty() {
        vec![]
    } else {
        rest.split(',').map(str::trim).collect()
    })
}

fn int(s: &str) -> i64 {
    s.parse().unwrap_or_else(|_| panic!("not an int: {s:?}"))
}

/// Executes one statement; `false` means Python would raise.
pub fn exec(a: &mut Vec<i64>, line: &str) -> bool {
    if let Some(args) = call_args(line, "a.append") {
        a.push(int(args[0]));
    } else if let Some(args) = call_args(line, "a.insert") {
        let n = a.len() as i64;
        let mut i = int(args[0]);
        if i < 0 {
            i += n;
            if i < 0 {
                i = 0;
            }
        }
        if i > n {
            i = n;
        }
        a.insert(i as usize, int(args[1]));
    } else if let Some(args) = call_args(line, "a.pop") {
        let n = a.len() as i64;
        let i = int(args[0]);
        let i = if i < 0 { i + n } else { i };
        if i < 0 || i >= n {
            return false;
        }
        a.remove(i as usize);
    } else if let Some(args) = call_args(line, "a.remove") {
        let v = int(args[0]);
        let mut found = None;
        for (k, x) in a.iter().enumerate() {
            if *x == v {
                found = Some(k);
                break;
            }
        }
        match found {
            Some(k) => {
                a.remove(k);
            }
            None => return false,
        }
    } else if line == "a.sort()" {
        // insertion sort, deliberately naive
        for i in 1..a.len() {
            let mut j = i;
            while j > 0 && a[j - 1] > a[j] {
                a.swap(j - 1, j);
                j -= 1;
            }
        }
    } else if line == "a.reverse()" {
        let mut b = Vec::new();
        while let Some(x) = a.pop() {
            b.push(x);
        }
        *a = b;
    } else if line == "print(\"Do nothing.\")" {
    } else {
        panic!("unknown statement {line:?}");
    }
    true
}

fn py_slice(a: &[i64], lo: usize, hi: usize) -> Vec<i64> {
    (lo..hi).filter(|&k| k < a.len()).map(|k| a[k]).collect()
}

/// Evaluates `print(a[lo:hi])`, `sum(...)`, `min(...)`, `max(...)` or `len(a)`.
pub fn view(a: &[i64], query: &str) -> Outcome {
    if query == "len(a)" {
        return Outcome::Int(a.len() as i64);
    }
    let (name, rest) = query.split_once('(').unwrap();
    let inner = rest
        .strip_prefix("a[")
        .and_then(|r| r.strip_suffix("])"))
        .unwrap();
    let (lo, hi) = inner.split_once(':').unwrap();
    let s = py_slice(a, lo.parse().unwrap(), hi.parse().unwrap());
    match name {
        "print" => Outcome::Text(format!(
            "[{}]",
            s.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        )),
        "sum" => Outcome::Int(s.iter().sum()),
        "min" => s.iter().copied().min().map_or(Outcome::Error, Outcome::Int),
        "max" => s.iter().copied().max().map_or(Outcome::Error, Outcome::Int),
        other => panic!("unknown view {other}"),
    }
}

pub fn run_source(initial: &[i64], lines: &[String], query: &str) -> Outcome {
    let mut a = initial.to_vec();
    for l in lines {
        if !exec(&mut a, l) {
            return Outcome::Error;
        }
    }
    view(&a, query)
}

pub fn run_oracle(prog: &ListProgram) -> Outcome {
    let lines: Vec<String> = prog.ops.iter().map(|o| o.op.to_string()).collect();
    run_source(&prog.initial, &lines, &prog.view.to_string())
}

/// A random op, valid or not; small ranges so removes and pops hit often.
pub fn random_op(rng: &mut impl Rng) -> ListOp {
    let v = rng.random_range(-6..=6);
    let i = rng.random_range(-9..=9);
    match rng.random_range(0..7) {
        0 => ListOp::Append(v),
        1 => ListOp::Insert(i, v),
        2 => ListOp::Pop(i),
        3 => ListOp::Remove(v),
        4 => ListOp::Sort,
        5 => ListOp::Reverse,
        _ => ListOp::PrintDoNothing,
    }
}

pub fn random_view(rng: &mut impl Rng) -> ViewOp {
    let kind = ViewKind::ALL[rng.random_range(0..ViewKind::ALL.len())];
    let lo = rng.random_range(0..10);
    let hi = rng.random_range(lo..=10);
    ViewOp::new(kind, lo, hi)
}

pub fn random_valid_program(rng: &mut impl Rng) -> ListProgram {
    let initial: Vec<i64> = (0..rng.random_range(0..8))
        .map(|_| rng.random_range(-6..=6))
        .collect();
    let mut state = initial.clone();
    let mut ops = Vec::new();
    let len = rng.random_range(0..40);
    while ops.len() < len {
        let op = random_op(rng);
        let mut next = state.clone();
        if exec(&mut next, &op.to_string()) {
            state = next;
            ops.push(ProgramOp {
                op,
                relevant: rng.random_bool(0.5),
            });
        }
    }
    ListProgram {
        initial,
        ops,
        view: random_view(rng),
    }
}

fn rendered(o: &Outcome) -> Option<String> {
    match o {
        Outcome::Int(n) => Some(n.to_string()),
        Outcome::Text(t) => Some(t.clone()),
        Outcome::Error => None,
    }
}

/// Checks a generated Latent List instance with the oracle interpreter: the
/// full program and the filler-free program give the ground truth, and
/// dropping any single relevant op changes it.
pub fn check_latent_list_instance(inst: &TaskInstance) -> Result<(), String> {
    let prog = program_from_instance(inst).map_err(|e| e.to_string())?;
    let truth = Some(inst.ground_truth.clone());
    if prog.complexity() as u32 != inst.complexity {
        return Err(format!(
            "{}: complexity {} != {}",
            inst.id,
            prog.complexity(),
            inst.complexity
        ));
    }
    if rendered(&run_oracle(&prog)) != truth {
        return Err(format!("{}: oracle disagrees with ground truth", inst.id));
    }
    if rendered(&run_oracle(&prog.without_filler())) != truth {
        return Err(format!("{}: removing filler changed the answer", inst.id));
    }
    for pos in prog.relevant_positions() {
        if rendered(&run_oracle(&prog.without(pos))) == truth {
            return Err(format!(
                "{}: ablating relevant op {pos} kept the answer",
                inst.id
            ));
        }
    }
    Ok(())
}

/// Brute-force longest common substring with difflib's tie-break: earliest
/// in `a`, then earliest in `b`.
fn longest(a: &[char], b: &[char]) -> (usize, usize, usize) {
    let mut best = (0, 0, 0);
    for i in 0..a.len() {
        for j in 0..b.len() {
            let mut k = 0;
            while i + k < a.len() && j + k < b.len() && a[i + k] == b[j + k] {
                k += 1;
            }
            if k > best.2 {
                best = (i, j, k);
            }
        }
    }
    best
}

fn matched(a: &[char], b: &[char]) -> usize {
    let (i, j, k) = longest(a, b);
    if k == 0 {
        return 0;
    }
    k + matched(&a[..i], &b[..j]) + matched(&a[i + k..], &b[j + k..])
}

/// Gestalt pattern matching ratio `2M / T` without junk heuristics.
pub fn ratcliff_obershelp(a: &str, b: &str) -> f64 {
    let (a, b): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
    let total = a.len() + b.len();
    if total == 0 {
        return 1.0;
    }
    2.0 * matched(&a, &b) as f64 / total as f64
}

/// The approximate list metric on already-parsed integers.
pub fn metric(truth: i64, answer: i64) -> f64 {
    let t = truth as f64;
    let rel = (t - answer as f64).abs() / (1e-10 + t.abs());
    1.0 - if rel > 1.0 { 1.0 } else { rel }
}
