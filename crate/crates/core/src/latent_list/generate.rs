//! Instance generation: relevant ops, state-invariant filler, and assembly.

use std::collections::{BTreeMap, HashSet};

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::program::{
    eval_view, final_state, run_program, ListOp, ListProgram, ProgramOp, ViewKind, ViewOp,
    INITIAL_LIST, VALUE_MAX, VALUE_MIN,
};
use super::prompt::render_prompt;
use crate::error::GenError;
use crate::instance::{instance_id, meta, ContextBucket, TaskInstance, TaskKind};
use crate::rng::RngStream;
use crate::tokenizer::Tokenizer;

/// Attempt cap for the relevance rejection sampler.
pub const MAX_ATTEMPTS: usize = 1000;
/// Full resample after this many local repairs without success.
const RESTART_EVERY: usize = 100;
/// Candidate replacements scored per repair step.
const REPAIR_CANDIDATES: usize = 8;
pub const COMPLEXITY_LEVELS: [u32; 3] = [1, 5, 20];
/// Accepted relative deviation of the prompt length from the target.
pub const LENGTH_TOLERANCE: f64 = 0.10;
/// The layout loop stops once within this relative deviation.
const LENGTH_AIM: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FillerStrategy {
    DoNothing,
    DoubleReverse,
    CancelingBlock,
}

impl FillerStrategy {
    pub const ALL: [FillerStrategy; 3] = [
        FillerStrategy::DoNothing,
        FillerStrategy::DoubleReverse,
        FillerStrategy::CancelingBlock,
    ];
}

fn random_value(rng: &mut RngStream) -> i64 {
    rng.random_range(VALUE_MIN..=VALUE_MAX)
}

/// Views are uniform over kind, and over slices `0 <= lo < hi <= 6`.
pub fn sample_view(rng: &mut RngStream) -> ViewOp {
    let kind = *ViewKind::ALL.choose(rng).unwrap();
    let n = INITIAL_LIST.len();
    // 21 pairs; draw one uniformly.
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|lo| (lo + 1..=n).map(move |hi| (lo, hi)))
        .collect();
    let (lo, hi) = *pairs.choose(rng).unwrap();
    ViewOp::new(kind, lo, hi)
}

fn sample_op(rng: &mut RngStream, state: &[i64], view: ViewOp) -> ListOp {
    const LEN_CHANGING: [u8; 4] = [0, 1, 2, 3];
    const ANY: [u8; 6] = [0, 1, 2, 3, 4, 5];
    let classes: &[u8] = if view.kind() == ViewKind::Len {
        &LEN_CHANGING
    } else {
        &ANY
    };
    // Positional ops target the part of the list the view can see.
    let reach = view.slice().map_or(usize::MAX, |(_, hi)| hi);
    loop {
        let class = *classes.choose(rng).unwrap();
        match class {
            0 => return ListOp::Append(random_value(rng)),
            1 => {
                let i = rng.random_range(0..=state.len().min(reach)) as i64;
                return ListOp::Insert(i, random_value(rng));
            }
            2 if !state.is_empty() => {
                return ListOp::Pop(rng.random_range(0..state.len().min(reach)) as i64);
            }
            3 if !state.is_empty() => return ListOp::Remove(*state.choose(rng).unwrap()),
            4 => return ListOp::Sort,
            5 => return ListOp::Reverse,
            _ => {}
        }
    }
}

/// Positions whose leave-one-out ablation fails to change the answer or
/// invalidates a later op. `None` when the program itself does not evaluate.
fn irrelevant_positions(ops: &[ListOp], view: ViewOp) -> Option<Vec<usize>> {
    // prefix[k] is the state before ops[k].
    let mut prefix = Vec::with_capacity(ops.len() + 1);
    let mut state = INITIAL_LIST.to_vec();
    for &op in ops {
        prefix.push(state.clone());
        super::program::apply_op_in_place(&mut state, op).ok()?;
    }
    let truth = eval_view(&state, view).ok()?;
    let mut scratch = Vec::new();
    let bad = (0..ops.len())
        .filter(|&k| {
            scratch.clear();
            scratch.extend_from_slice(&prefix[k]);
            let replay = ops[k + 1..]
                .iter()
                .try_for_each(|&op| super::program::apply_op_in_place(&mut scratch, op));
            match replay.and_then(|_| eval_view(&scratch, view)) {
                Ok(ans) => ans == truth,
                Err(_) => true,
            }
        })
        .collect();
    Some(bad)
}

/// Re-samples `ops[from..]` entries that are invalid at their state.
fn revalidate_from(rng: &mut RngStream, ops: &mut [ListOp], from: usize, view: ViewOp) {
    let mut state = INITIAL_LIST.to_vec();
    for (i, op) in ops.iter_mut().enumerate() {
        if i >= from && !op.is_valid_at(&state) {
            *op = sample_op(rng, &state, view);
        }
        super::program::apply_op_in_place(&mut state, *op).expect("op validated above");
    }
}

fn fresh_sequence(rng: &mut RngStream, complexity: usize, view: ViewOp) -> Vec<ListOp> {
    let mut state = INITIAL_LIST.to_vec();
    let mut ops = Vec::with_capacity(complexity);
    for _ in 0..complexity {
        let op = sample_op(rng, &state, view);
        super::program::apply_op_in_place(&mut state, op).expect("sampled op is valid");
        ops.push(op);
    }
    ops
}

/// Samples exactly `complexity` ops, each of which changes the view's answer
/// when ablated (later ops re-validated).
pub fn gen_relevant_ops(
    rng: &mut RngStream,
    complexity: usize,
    view: ViewOp,
) -> Result<Vec<ListOp>, GenError> {
    if complexity == 0 {
        return Err(GenError::InvalidConfig(
            "latent list complexity must be at least 1".into(),
        ));
    }
    let mut ops = Vec::new();
    for attempt in 0..MAX_ATTEMPTS {
        if attempt % RESTART_EVERY == 0 {
            ops = fresh_sequence(rng, complexity, view);
        }
        let bad = match irrelevant_positions(&ops, view) {
            Some(bad) if bad.is_empty() => return Ok(ops),
            Some(bad) => bad,
            None => (0..ops.len()).collect(),
        };
        let k = *bad.choose(rng).unwrap();
        let state = final_state(&INITIAL_LIST, ops[..k].iter().copied()).expect("prefix is valid");
        // Greedy repair: take the first candidate that does not leave more
        // irrelevant ops, else the best of the batch.
        let current = bad.len();
        let mut best: Option<(usize, Vec<ListOp>)> = None;
        for _ in 0..REPAIR_CANDIDATES {
            let mut cand = ops.clone();
            cand[k] = sample_op(rng, &state, view);
            revalidate_from(rng, &mut cand, k + 1, view);
            let score = irrelevant_positions(&cand, view).map_or(usize::MAX, |b| b.len());
            let accept = score < current;
            if best.as_ref().is_none_or(|(s, _)| score < *s) {
                best = Some((score, cand));
            }
            if accept {
                break;
            }
        }
        ops = best.expect("at least one candidate").1;
    }
    Err(GenError::GenerationExhausted {
        what: format!("{complexity} relevant ops for {view}"),
        attempts: MAX_ATTEMPTS,
    })
}

pub fn gen_filler_block(
    rng: &mut RngStream,
    strategy: FillerStrategy,
    state: &[i64],
) -> Vec<ListOp> {
    gen_filler_block_avoiding(rng, strategy, state, &HashSet::new())
}

/// Like [`gen_filler_block`], but canceling blocks also avoid every value in
/// `avoid`. Passing all values a program can ever hold makes the block an
/// identity at every reachable state, not only at `state`.
pub fn gen_filler_block_avoiding(
    rng: &mut RngStream,
    strategy: FillerStrategy,
    state: &[i64],
    avoid: &HashSet<i64>,
) -> Vec<ListOp> {
    match strategy {
        FillerStrategy::DoNothing => vec![ListOp::PrintDoNothing],
        FillerStrategy::DoubleReverse => vec![ListOp::Reverse, ListOp::Reverse],
        FillerStrategy::CancelingBlock => {
            let depth = rng.random_range(1..=2usize);
            let mut values: Vec<i64> = Vec::with_capacity(depth);
            while values.len() < depth {
                let v = random_value(rng);
                if !avoid.contains(&v) && !state.contains(&v) && !values.contains(&v) {
                    values.push(v);
                }
            }
            let mut block = Vec::with_capacity(depth * 2);
            let mut len = state.len();
            for &v in &values {
                if rng.random_bool(0.5) {
                    block.push(ListOp::Append(v));
                } else {
                    block.push(ListOp::Insert(rng.random_range(0..=len) as i64, v));
                }
                len += 1;
            }
            block.extend(values.iter().rev().map(|&v| ListOp::Remove(v)));
            block
        }
    }
}

/// Redraws of the view allowed when a view admits no all-relevant program.
pub const VIEW_REDRAWS: usize = 16;

/// Samples a view and a relevant-op sequence for it, redrawing the view when
/// the sampler is exhausted.
pub fn sample_view_and_ops(
    rng: &mut RngStream,
    complexity: usize,
) -> Result<(ViewOp, Vec<ListOp>), GenError> {
    let mut last = None;
    for _ in 0..VIEW_REDRAWS {
        let view = sample_view(rng);
        match gen_relevant_ops(rng, complexity, view) {
            Ok(ops) => return Ok((view, ops)),
            Err(e @ GenError::GenerationExhausted { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one draw"))
}

/// Lays out `relevant` ops among `blocks` filler blocks. Slots are uniform
/// over the `blocks + 1` gaps.
fn layout(rng: &mut RngStream, relevant: &[ListOp], blocks: usize, view: ViewOp) -> ListProgram {
    let avoid: HashSet<i64> = INITIAL_LIST
        .iter()
        .copied()
        .chain(relevant.iter().filter_map(|op| match *op {
            ListOp::Append(v) | ListOp::Insert(_, v) | ListOp::Remove(v) => Some(v),
            _ => None,
        }))
        .collect();
    let mut slots: Vec<usize> = (0..relevant.len())
        .map(|_| rng.random_range(0..=blocks))
        .collect();
    slots.sort_unstable();

    let mut ops = Vec::with_capacity(blocks * 2 + relevant.len());
    let mut state = INITIAL_LIST.to_vec();
    let mut next = 0;
    for gap in 0..=blocks {
        while next < relevant.len() && slots[next] == gap {
            let op = relevant[next];
            super::program::apply_op_in_place(&mut state, op).expect("relevant ops are valid");
            ops.push(ProgramOp { op, relevant: true });
            next += 1;
        }
        if gap < blocks {
            let strategy = *FillerStrategy::ALL.choose(rng).unwrap();
            for op in gen_filler_block_avoiding(rng, strategy, &state, &avoid) {
                ops.push(ProgramOp {
                    op,
                    relevant: false,
                });
            }
        }
    }
    ListProgram {
        initial: INITIAL_LIST.to_vec(),
        ops,
        view,
    }
}

fn render_program(prog: &ListProgram) -> String {
    let ops: Vec<ListOp> = prog.ops.iter().map(|o| o.op).collect();
    render_prompt(&ops, prog.view)
}

fn config_fingerprint(
    rng: &RngStream,
    complexity: u32,
    bucket: ContextBucket,
    target: usize,
    tok: &dyn Tokenizer,
) -> String {
    format!(
        "latent_list/v1|{}|{}|{}|{}|{}|{}",
        rng.index(),
        rng.label(),
        complexity,
        bucket,
        target,
        tok.name()
    )
}

/// Output of the layout search: the program and its rendered prompt.
pub struct LaidOut {
    pub program: ListProgram,
    pub prompt: String,
    pub tokens: usize,
}

/// Finds a filler volume that puts the rendered prompt within tolerance of
/// `target_tokens`.
pub(crate) fn fit_to_target<T>(
    target_tokens: usize,
    tok: &dyn Tokenizer,
    mut build: impl FnMut(usize) -> (T, String),
    mut units_per_token_guess: f64,
) -> Result<(T, String, usize), GenError> {
    let (first, first_prompt) = build(0);
    let base = tok.count(&first_prompt);
    let target = target_tokens as f64;
    if base as f64 > target * (1.0 + LENGTH_TOLERANCE) {
        return Err(GenError::TargetTooSmall {
            base_tokens: base,
            target_tokens,
        });
    }
    let mut best = (first, first_prompt, base);
    let mut units = 0usize;
    for _ in 0..8 {
        let dev = (best.2 as f64 - target) / target;
        if dev.abs() <= LENGTH_AIM {
            break;
        }
        let delta = (target - best.2 as f64) * units_per_token_guess;
        let next_units = (units as f64 + delta).round().max(0.0) as usize;
        if next_units == units {
            break;
        }
        let (item, prompt) = build(next_units);
        let tokens = tok.count(&prompt);
        if tokens > base && next_units > 0 {
            units_per_token_guess = next_units as f64 / (tokens - base) as f64;
        }
        units = next_units;
        let better = (tokens as f64 - target).abs() < (best.2 as f64 - target).abs();
        if better {
            best = (item, prompt, tokens);
        }
    }
    let dev = (best.2 as f64 - target).abs() / target;
    if dev > LENGTH_TOLERANCE {
        return Err(GenError::LengthMiss {
            achieved: best.2,
            target_tokens,
        });
    }
    Ok(best)
}

pub fn assemble_latent_list_instance(
    rng: &RngStream,
    complexity: u32,
    bucket: ContextBucket,
    target_tokens: usize,
    tok: &dyn Tokenizer,
) -> Result<TaskInstance, GenError> {
    if !COMPLEXITY_LEVELS.contains(&complexity) {
        return Err(GenError::InvalidConfig(format!(
            "latent list complexity must be one of 1, 5, 20; got {complexity}"
        )));
    }
    if target_tokens == 0 || target_tokens > bucket.max_tokens() {
        return Err(GenError::InvalidConfig(format!(
            "target {target_tokens} outside bucket {bucket}"
        )));
    }
    let (view, relevant) = sample_view_and_ops(&mut rng.child("relevant"), complexity as usize)?;

    // Every filler block is 1, 2, 3 or 5 ops; about 5 tokens per op line.
    let guess = 1.0 / 8.0;
    let (program, prompt, tokens) = fit_to_target(
        target_tokens,
        tok,
        |blocks| {
            let prog = layout(&mut rng.child("layout"), &relevant, blocks, view);
            let prompt = render_program(&prog);
            (prog, prompt)
        },
        guess,
    )?;

    let truth = run_program(&program).map_err(|e| GenError::Internal(e.to_string()))?;
    debug_assert_eq!(
        run_program(&program.without_filler()).ok(),
        Some(truth.clone())
    );

    let mut metadata = BTreeMap::new();
    metadata.insert(meta::VIEW_KIND.into(), view.kind().to_string());
    metadata.insert(meta::VIEW.into(), view.to_string());
    metadata.insert(
        "relevant_positions".into(),
        program
            .relevant_positions()
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    metadata.insert("program_ops".into(), program.ops.len().to_string());
    metadata.insert(meta::PROMPT_TOKENS.into(), tokens.to_string());
    metadata.insert(meta::TOKENIZER.into(), tok.name().to_owned());

    let fingerprint = config_fingerprint(rng, complexity, bucket, target_tokens, tok);
    Ok(TaskInstance {
        id: instance_id(TaskKind::LatentList, rng.seed(), &fingerprint),
        kind: TaskKind::LatentList,
        seed: rng.seed(),
        complexity,
        bucket,
        target_context_tokens: target_tokens,
        prompt,
        ground_truth: truth.to_string(),
        metadata,
    })
}

/// Rebuilds the emitted program (with relevance flags) from an instance.
pub fn program_from_instance(inst: &TaskInstance) -> Result<ListProgram, GenError> {
    let (ops, view) = super::prompt::parse_query_program(&inst.prompt)
        .map_err(|e| GenError::Internal(e.to_string()))?;
    let relevant: HashSet<usize> = inst
        .meta("relevant_positions")
        .unwrap_or("")
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| GenError::Internal(format!("bad relevant position {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    Ok(ListProgram {
        initial: INITIAL_LIST.to_vec(),
        ops: ops
            .into_iter()
            .enumerate()
            .map(|(i, op)| ProgramOp {
                op,
                relevant: relevant.contains(&i),
            })
            .collect(),
        view,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latent_list::program::{apply_op, ListAnswer, ListError};
    use crate::rng::derive_rng;
    use crate::tokenizer::HeuristicTokenizer;

    fn eval_ops(ops: &[ListOp], view: ViewOp) -> Result<ListAnswer, ListError> {
        eval_view(&final_state(&INITIAL_LIST, ops.iter().copied())?, view)
    }

    fn ablation_changes_answer(ops: &[ListOp], view: ViewOp) -> bool {
        let truth = eval_ops(ops, view).unwrap();
        (0..ops.len()).all(|k| {
            let rest: Vec<ListOp> = ops
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, o)| *o)
                .collect();
            eval_ops(&rest, view).map(|a| a != truth).unwrap_or(false)
        })
    }

    #[test]
    fn len_view_single_op_changes_length() {
        for i in 0..50 {
            let ops = gen_relevant_ops(&mut derive_rng(3, i, "t"), 1, ViewOp::Len).unwrap();
            assert_eq!(ops.len(), 1);
            assert!(ops[0].changes_length(), "{:?}", ops[0]);
        }
    }

    #[test]
    fn every_op_is_relevant_for_all_views() {
        let mut rng = derive_rng(11, 0, "views");
        for i in 0..200u64 {
            let view = sample_view(&mut rng);
            for c in COMPLEXITY_LEVELS {
                let ops = gen_relevant_ops(&mut derive_rng(11, i, "ops"), c as usize, view)
                    .unwrap_or_else(|e| panic!("{view} c={c}: {e}"));
                assert_eq!(ops.len(), c as usize);
                assert!(ablation_changes_answer(&ops, view), "{view} {ops:?}");
            }
        }
    }

    #[test]
    fn relevant_ops_deterministic() {
        let view = ViewOp::SumSlice(1, 4);
        let a = gen_relevant_ops(&mut derive_rng(5, 5, "x"), 20, view).unwrap();
        let b = gen_relevant_ops(&mut derive_rng(5, 5, "x"), 20, view).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn filler_blocks_are_identities() {
        let mut rng = derive_rng(1, 0, "filler");
        for state in [vec![], vec![5], vec![1, 2, 3], vec![9, -9, 9, 0]] {
            for strategy in FillerStrategy::ALL {
                for _ in 0..20 {
                    let block = gen_filler_block(&mut rng, strategy, &state);
                    let after = block
                        .iter()
                        .try_fold(state.clone(), |s, &op| apply_op(&s, op))
                        .unwrap();
                    assert_eq!(after, state);
                }
            }
        }
        assert_eq!(
            gen_filler_block(&mut rng, FillerStrategy::DoubleReverse, &[1, 2, 3]),
            vec![ListOp::Reverse; 2]
        );
        assert_eq!(
            gen_filler_block(&mut rng, FillerStrategy::DoNothing, &[]),
            vec![ListOp::PrintDoNothing]
        );
    }

    #[test]
    fn instance_hits_length_and_complexity() {
        let tok = HeuristicTokenizer;
        let rng = derive_rng(42, 0, "latent_list");
        let inst =
            assemble_latent_list_instance(&rng, 5, ContextBucket::B32K, 30_000, &tok).unwrap();
        let tokens = tok.count(&inst.prompt);
        assert!(tokens.abs_diff(30_000) <= 3_000, "{tokens}");
        let prog = program_from_instance(&inst).unwrap();
        assert_eq!(prog.complexity(), 5);
        assert_eq!(run_program(&prog).unwrap().to_string(), inst.ground_truth);
        assert_eq!(
            run_program(&prog.without_filler()).unwrap().to_string(),
            inst.ground_truth
        );
        let again =
            assemble_latent_list_instance(&rng, 5, ContextBucket::B32K, 30_000, &tok).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn rejects_bad_config() {
        let tok = HeuristicTokenizer;
        let rng = derive_rng(1, 0, "x");
        assert!(matches!(
            assemble_latent_list_instance(&rng, 3, ContextBucket::B32K, 10_000, &tok),
            Err(GenError::InvalidConfig(_))
        ));
        assert!(matches!(
            assemble_latent_list_instance(&rng, 1, ContextBucket::B32K, 40_000, &tok),
            Err(GenError::InvalidConfig(_))
        ));
        assert!(matches!(
            assemble_latent_list_instance(&rng, 1, ContextBucket::B32K, 50, &tok),
            Err(GenError::TargetTooSmall { .. })
        ));
    }
}
