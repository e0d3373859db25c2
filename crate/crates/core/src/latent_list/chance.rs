//! Monte Carlo chance rate for the list task.
//!
//! The random model knows the numbers that appear in the relevant ops and the
//! initial list but not how they combine. `len` views compare a uniform guess
//! in `[0, complexity]` against a truth drawn the same way.

use std::collections::BTreeMap;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use super::generate::sample_view_and_ops;
use super::program::{
    eval_view, final_state, render_list, ListAnswer, ListOp, ViewKind, INITIAL_LIST,
};
use super::score::{score_by_kind, ParsedAnswer};
use crate::rng::RngStream;
use crate::stats::MeanAccumulator;

pub const MIN_TRIALS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ChanceEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub trials: usize,
    pub per_view: BTreeMap<ViewKind, f64>,
}

/// The random model's guess at the latent list: a uniformly random subset of
/// the values in the relevant ops plus a random subset of the initial list,
/// shuffled.
fn random_latent_list(rng: &mut RngStream, relevant: &[ListOp]) -> Vec<i64> {
    let mut guess: Vec<i64> = relevant
        .iter()
        .filter_map(|op| match *op {
            ListOp::Append(v) | ListOp::Insert(_, v) => Some(v),
            _ => None,
        })
        .chain(INITIAL_LIST)
        .filter(|_| rng.random_bool(0.5))
        .collect();
    guess.shuffle(rng);
    guess
}

fn random_slice<'a>(rng: &mut RngStream, values: &'a [i64]) -> &'a [i64] {
    if values.is_empty() {
        return values;
    }
    let n = values.len();
    // Uniform over pairs 0 <= lo < hi <= n.
    let pairs = n * (n + 1) / 2;
    let mut k = rng.random_range(0..pairs);
    let mut lo = 0;
    while k >= n - lo {
        k -= n - lo;
        lo += 1;
    }
    &values[lo..lo + k + 1]
}

/// Random-model guesses scored against each sampled program. Programs are
/// expensive to sample at high complexity; guesses are cheap.
pub const GUESSES_PER_PROGRAM: usize = 20;

/// One cluster: a view and (for slice views) a program, scored against
/// `guesses` independent random-model outputs. Returns the cluster mean.
fn one_cluster(rng: &mut RngStream, complexity: usize, guesses: usize) -> (ViewKind, f64) {
    let (view, ops) = sample_view_and_ops(rng, complexity)
        .expect("relevant-op sampler succeeds for standard levels");
    let kind = view.kind();
    let mut acc = MeanAccumulator::default();
    if kind == ViewKind::Len {
        for _ in 0..guesses {
            let truth = rng.random_range(0..=complexity) as i64;
            let guess = rng.random_range(0..=complexity) as i64;
            acc.push(score_by_kind(
                &ListAnswer::Number(guess).into(),
                &ListAnswer::Number(truth),
                kind,
            ));
        }
        return (kind, acc.mean());
    }
    let state = final_state(&INITIAL_LIST, ops.iter().copied()).expect("generated ops are valid");
    let truth = eval_view(&state, view).expect("generated view is evaluable");
    for _ in 0..guesses {
        let latent = random_latent_list(rng, &ops);
        let guess: ParsedAnswer = match kind {
            ViewKind::Print => ListAnswer::Text(render_list(random_slice(rng, &latent))).into(),
            ViewKind::Sum => ListAnswer::Number(random_slice(rng, &latent).iter().sum()).into(),
            ViewKind::Min | ViewKind::Max => match latent.choose(rng) {
                Some(&v) => ListAnswer::Number(v).into(),
                None => ParsedAnswer::ParseFailure,
            },
            ViewKind::Len => unreachable!(),
        };
        acc.push(score_by_kind(&guess, &truth, kind));
    }
    (kind, acc.mean())
}

/// Estimates the chance rate with at least `trials` scored guesses. The
/// standard error is computed over cluster means.
pub fn latent_list_chance_rate(
    rng: &mut RngStream,
    complexity: usize,
    trials: usize,
) -> ChanceEstimate {
    let clusters = trials.div_ceil(GUESSES_PER_PROGRAM).max(2);
    let mut all = MeanAccumulator::default();
    let mut by_view: BTreeMap<ViewKind, MeanAccumulator> = BTreeMap::new();
    for _ in 0..clusters {
        let (kind, mean) = one_cluster(rng, complexity, GUESSES_PER_PROGRAM);
        all.push(mean);
        by_view.entry(kind).or_default().push(mean);
    }
    ChanceEstimate {
        mean: all.mean(),
        std_err: all.std_err(),
        trials: clusters * GUESSES_PER_PROGRAM,
        per_view: by_view
            .into_iter()
            .map(|(k, acc)| (k, acc.mean()))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_rng;

    #[test]
    fn random_slice_is_uniform_over_pairs() {
        let values = [1, 2, 3];
        let mut rng = derive_rng(0, 0, "slice");
        let mut counts = BTreeMap::new();
        for _ in 0..60_000 {
            *counts
                .entry(random_slice(&mut rng, &values).to_vec())
                .or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 6);
        for c in counts.values() {
            assert!((*c as f64 - 10_000.0).abs() < 500.0, "{counts:?}");
        }
    }

    #[test]
    fn rates_fall_with_complexity() {
        let rates: Vec<f64> = [1usize, 5, 20]
            .iter()
            .map(|&c| {
                latent_list_chance_rate(&mut derive_rng(1, c as u64, "chance"), c, 20_000).mean
            })
            .collect();
        assert!(rates[0] > rates[1] && rates[1] > rates[2], "{rates:?}");
        assert!(rates.iter().all(|r| (0.0..1.0).contains(r)));
    }
}
