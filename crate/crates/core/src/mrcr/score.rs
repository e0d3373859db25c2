//! Prefix-gated similarity scoring and chance-rate models.

use serde::Serialize;

use super::generate::{conversation_from_instance, Conversation};
use crate::error::GenError;
use crate::instance::TaskInstance;
use crate::textsim::{similarity_ratio_with, SimilarityOptions};

/// Matcher settings used for MRCR outputs.
pub const MRCR_SIMILARITY: SimilarityOptions = SimilarityOptions::DIFFLIB_DEFAULT;

pub fn mrcr_score(raw: &str, prefix: &str, truth_body: &str) -> f64 {
    mrcr_score_with(raw, prefix, truth_body, MRCR_SIMILARITY)
}

pub fn mrcr_score_with(raw: &str, prefix: &str, truth_body: &str, opts: SimilarityOptions) -> f64 {
    if prefix.is_empty() {
        return 0.0;
    }
    match raw.find(prefix) {
        None => 0.0,
        Some(at) => {
            let rest = raw[at + prefix.len()..].trim_start();
            similarity_ratio_with(rest, truth_body, opts)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MrcrChanceMode {
    /// Any response in the conversation.
    UniformAll,
    /// Responses sharing the key's topic or format.
    PartialKeyMatch,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    /// Bin edges, `counts.len() + 1` of them; the last bin is closed.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn unit(values: &[f64], bins: usize) -> Histogram {
        let bins = bins.max(1);
        let mut counts = vec![0; bins];
        for &v in values {
            let b = ((v.clamp(0.0, 1.0) * bins as f64) as usize).min(bins - 1);
            counts[b] += 1;
        }
        Histogram {
            edges: (0..=bins).map(|i| i as f64 / bins as f64).collect(),
            counts,
        }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MrcrChance {
    pub mode: MrcrChanceMode,
    pub mean: f64,
    pub per_instance: Vec<f64>,
    pub histogram: Histogram,
}

/// Expected score of a model that answers with a uniformly chosen response.
pub fn conversation_chance(conv: &Conversation, mode: MrcrChanceMode) -> Result<f64, GenError> {
    let truth = conv
        .target()
        .ok_or_else(|| GenError::InvalidConfig(format!("key {} does not resolve", conv.key)))?;
    let candidates: Vec<&str> = match mode {
        MrcrChanceMode::UniformAll => conv.turns.iter().map(|t| t.response.as_str()).collect(),
        MrcrChanceMode::PartialKeyMatch => conv
            .partial_matches()
            .map(|t| t.response.as_str())
            .collect(),
    };
    let total: f64 = candidates
        .iter()
        .map(|c| {
            if *c == truth.response {
                1.0
            } else {
                similarity_ratio_with(c, &truth.response, MRCR_SIMILARITY)
            }
        })
        .sum();
    Ok(total / candidates.len() as f64)
}

pub fn mrcr_chance_rate(
    instances: &[TaskInstance],
    mode: MrcrChanceMode,
) -> Result<MrcrChance, GenError> {
    let per_instance = instances
        .iter()
        .map(|inst| conversation_chance(&conversation_from_instance(inst)?, mode))
        .collect::<Result<Vec<_>, _>>()?;
    let mean = if per_instance.is_empty() {
        0.0
    } else {
        per_instance.iter().sum::<f64>() / per_instance.len() as f64
    };
    let histogram = Histogram::unit(&per_instance, 10);
    Ok(MrcrChance {
        mode,
        mean,
        per_instance,
        histogram,
    })
}
