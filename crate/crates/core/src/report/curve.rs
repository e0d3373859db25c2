//! Cumulative context curves and bucket-stratified means.

use std::collections::BTreeMap;

use serde::Serialize;

use super::score::ScoreRecord;
use super::ReportError;
use crate::instance::ContextBucket;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub context_tokens: usize,
    pub cumulative_mean: f64,
    pub n: usize,
}

/// Grid of realized lengths at `points` evenly spaced quantiles; always ends at the maximum.
pub fn quantile_grid(lengths: &[usize], points: usize) -> Vec<usize> {
    if lengths.is_empty() || points == 0 {
        return Vec::new();
    }
    let mut sorted = lengths.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    let mut grid: Vec<usize> = (1..=points)
        .map(|i| sorted[(i * n).div_ceil(points) - 1])
        .collect();
    grid.dedup();
    grid
}

pub const DEFAULT_GRID_POINTS: usize = 20;

/// Mean of all scores at or below each grid length. Grid points with no scores are skipped.
pub fn cumulative_curve(scores: &[ScoreRecord], grid: Option<&[usize]>) -> Vec<CurvePoint> {
    let mut pairs: Vec<(usize, f64)> = scores.iter().map(|s| (s.context_tokens, s.score)).collect();
    pairs.sort_by_key(|p| p.0);
    let default_grid;
    let grid = match grid {
        Some(g) => g,
        None => {
            default_grid = quantile_grid(
                &pairs.iter().map(|p| p.0).collect::<Vec<_>>(),
                DEFAULT_GRID_POINTS,
            );
            &default_grid
        }
    };
    let mut xs = grid.to_vec();
    xs.sort_unstable();
    xs.dedup();
    let (mut i, mut sum) = (0, 0.0);
    let mut out = Vec::with_capacity(xs.len());
    for x in xs {
        while i < pairs.len() && pairs[i].0 <= x {
            sum += pairs[i].1;
            i += 1;
        }
        if i > 0 {
            out.push(CurvePoint {
                context_tokens: x,
                cumulative_mean: sum / i as f64,
                n: i,
            });
        }
    }
    out
}

/// Weighted mean over the union of bucket subsets.
///
/// A score whose length falls in range `r` appears in every included subset
/// whose bucket is at least `r`; it is weighted by one over that count.
pub fn stratified_union(
    subsets: &BTreeMap<ContextBucket, Vec<ScoreRecord>>,
    include: &[ContextBucket],
) -> Result<f64, ReportError> {
    let mut included: Vec<ContextBucket> = include.to_vec();
    included.sort();
    included.dedup();
    if included.is_empty() {
        return Err(ReportError::EmptyInput("no subsets included".into()));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for &b in &included {
        let scores = subsets.get(&b).ok_or(ReportError::MissingSubset(b))?;
        for s in scores {
            let range = ContextBucket::containing(s.context_tokens);
            if range > b {
                return Err(ReportError::RangeOutsideSubset {
                    subset: b,
                    id: s.instance_id.clone(),
                    tokens: s.context_tokens,
                });
            }
            let k = included.iter().filter(|&&c| c >= range).count();
            let w = 1.0 / k as f64;
            num += w * s.score;
            den += w;
        }
    }
    if den == 0.0 {
        return Err(ReportError::EmptyInput(
            "included subsets hold no scores".into(),
        ));
    }
    Ok(num / den)
}
