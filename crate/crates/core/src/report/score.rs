//! Joining instances with run records and applying the task metrics.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::ReportError;
use crate::harness::EvalRecord;
use crate::idk::{choices_from_instance, idk_score};
use crate::instance::{meta, ContextBucket, TaskInstance, TaskKind};
use crate::latent_list::program::{ListAnswer, ViewKind};
use crate::latent_list::score::{parse_latent_list_answer, score_by_kind};
use crate::mrcr::mrcr_score;
use crate::tokenizer::{HeuristicTokenizer, Tokenizer};

pub const ERRORED_TAG: &str = "errored";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreRecord {
    pub instance_id: String,
    pub model_id: String,
    pub task: TaskKind,
    pub score: f64,
    pub context_tokens: usize,
    pub complexity: u32,
    pub bucket: ContextBucket,
    /// `view_kind`, `answerable`, `key_arity` and `errored` where they apply.
    pub tags: BTreeMap<String, String>,
}

impl ScoreRecord {
    pub fn tag(&self, key: &str) -> Option<&str> {
        self.tags.get(key).map(String::as_str)
    }
}

fn bad(inst: &TaskInstance, what: impl Into<String>) -> ReportError {
    ReportError::BadInstance {
        id: inst.id.clone(),
        message: what.into(),
    }
}

/// Metric for one raw output against its instance.
pub fn score_output(inst: &TaskInstance, raw: &str) -> Result<f64, ReportError> {
    Ok(match inst.kind {
        TaskKind::LatentList => {
            let kind = inst
                .meta(meta::VIEW_KIND)
                .and_then(ViewKind::parse)
                .ok_or_else(|| bad(inst, "missing or unknown view_kind"))?;
            let truth = match kind {
                ViewKind::Print => ListAnswer::Text(inst.ground_truth.clone()),
                _ => ListAnswer::Number(inst.ground_truth.parse().map_err(|_| {
                    bad(inst, format!("non-integer truth {:?}", inst.ground_truth))
                })?),
            };
            score_by_kind(&parse_latent_list_answer(raw), &truth, kind)
        }
        TaskKind::Mrcr => {
            let prefix = inst
                .meta(meta::MRCR_PREFIX)
                .ok_or_else(|| bad(inst, "missing random_prefix"))?;
            let body = inst
                .meta(meta::MRCR_TRUTH_BODY)
                .ok_or_else(|| bad(inst, "missing truth_body"))?;
            mrcr_score(raw, prefix, body)
        }
        TaskKind::Idk => {
            let choices = choices_from_instance(inst).map_err(|e| bad(inst, e.to_string()))?;
            let truth = inst
                .ground_truth
                .chars()
                .next()
                .ok_or_else(|| bad(inst, "empty truth"))?;
            idk_score(raw, truth, &choices)
        }
    })
}

fn slice_tags(inst: &TaskInstance) -> BTreeMap<String, String> {
    let keys: &[&str] = match inst.kind {
        TaskKind::LatentList => &[meta::VIEW_KIND],
        TaskKind::Mrcr => &[meta::MRCR_KEY_ARITY],
        TaskKind::Idk => &[meta::IDK_ANSWERABLE],
    };
    keys.iter()
        .filter_map(|k| inst.meta(k).map(|v| ((*k).to_owned(), v.to_owned())))
        .collect()
}

pub fn context_tokens(inst: &TaskInstance) -> usize {
    inst.prompt_tokens()
        .unwrap_or_else(|| HeuristicTokenizer.count(&inst.prompt))
}

/// One score per (instance, model): the successful record if any, else the last failure.
pub fn score_run(
    instances: &[TaskInstance],
    records: &[EvalRecord],
) -> Result<Vec<ScoreRecord>, ReportError> {
    let by_id: HashMap<&str, &TaskInstance> =
        instances.iter().map(|i| (i.id.as_str(), i)).collect();
    let mut chosen: BTreeMap<(&str, &str), &EvalRecord> = BTreeMap::new();
    for r in records {
        if !by_id.contains_key(r.instance_id.as_str()) {
            return Err(ReportError::UnknownInstance(r.instance_id.clone()));
        }
        let slot = chosen
            .entry((r.model_id.as_str(), r.instance_id.as_str()))
            .or_insert(r);
        if !slot.is_success() {
            *slot = r;
        }
    }
    chosen
        .into_values()
        .map(|r| {
            let inst = by_id[r.instance_id.as_str()];
            let mut tags = slice_tags(inst);
            let score = if r.is_success() {
                score_output(inst, &r.raw_output)?
            } else {
                tags.insert(ERRORED_TAG.into(), "true".into());
                0.0
            };
            Ok(ScoreRecord {
                instance_id: inst.id.clone(),
                model_id: r.model_id.clone(),
                task: inst.kind,
                score,
                context_tokens: context_tokens(inst),
                complexity: inst.complexity,
                bucket: inst.bucket,
                tags,
            })
        })
        .collect()
}
