//! Whole-run instance generation.

use rand::Rng;
use thiserror::Error;

use crate::error::GenError;
use crate::idk::{assemble_idk_instance_with, sample_answerable, IdkOptions};
use crate::instance::{ContextBucket, TaskInstance, TaskKind};
use crate::latent_list::generate::{assemble_latent_list_instance, COMPLEXITY_LEVELS};
use crate::mrcr::{assemble_mrcr_instance, WritingPool};
use crate::rng::{derive_rng, RngStream};
use crate::tokenizer::Tokenizer;

pub const MRCR_COMPLEXITIES: [u32; 2] = [1, 2];

/// Headroom kept below the bucket ceiling for the length tolerance.
pub const BUCKET_HEADROOM: f64 = 1.1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{task} instance {index} in bucket {bucket} (seed {seed}): {source}")]
pub struct SuiteError {
    pub task: TaskKind,
    pub bucket: ContextBucket,
    pub index: u64,
    pub seed: u64,
    pub source: GenError,
}

pub struct GenContext<'a> {
    pub seed: u64,
    pub tokenizer: &'a dyn Tokenizer,
    pub pool: &'a dyn WritingPool,
    pub min_tokens: usize,
    pub idk: IdkOptions,
}

pub fn instance_stream(seed: u64, task: TaskKind, bucket: ContextBucket, index: u64) -> RngStream {
    derive_rng(seed, index, &format!("{task}/{bucket}"))
}

/// Complexities cycle with the index so each level is equally represented.
pub fn complexity_for(task: TaskKind, index: u64) -> Option<u32> {
    match task {
        TaskKind::LatentList => Some(COMPLEXITY_LEVELS[(index % 3) as usize]),
        TaskKind::Mrcr => Some(MRCR_COMPLEXITIES[(index % 2) as usize]),
        TaskKind::Idk => None,
    }
}

pub fn draw_target(rng: &RngStream, bucket: ContextBucket, min_tokens: usize) -> usize {
    let hi = (bucket.max_tokens() as f64 / BUCKET_HEADROOM).floor() as usize;
    rng.child("target").random_range(min_tokens.min(hi)..=hi)
}

pub fn generate_one(
    ctx: &GenContext<'_>,
    task: TaskKind,
    bucket: ContextBucket,
    index: u64,
) -> Result<TaskInstance, SuiteError> {
    let rng = instance_stream(ctx.seed, task, bucket, index);
    let target = draw_target(&rng, bucket, ctx.min_tokens);
    let result = match task {
        TaskKind::LatentList => assemble_latent_list_instance(
            &rng,
            complexity_for(task, index).unwrap(),
            bucket,
            target,
            ctx.tokenizer,
        ),
        TaskKind::Mrcr => assemble_mrcr_instance(
            &rng,
            ctx.pool,
            complexity_for(task, index).unwrap(),
            bucket,
            target,
            ctx.tokenizer,
        ),
        TaskKind::Idk => assemble_idk_instance_with(
            &rng,
            sample_answerable(&rng),
            bucket,
            target,
            ctx.tokenizer,
            &ctx.idk,
        ),
    };
    result.map_err(|source| SuiteError {
        task,
        bucket,
        index,
        seed: ctx.seed,
        source,
    })
}

/// Instances for every (task, bucket) pair, `n` each, in a fixed order.
pub fn generate_suite(
    ctx: &GenContext<'_>,
    tasks: &[TaskKind],
    buckets: &[ContextBucket],
    n: usize,
) -> Result<Vec<TaskInstance>, SuiteError> {
    let mut out = Vec::with_capacity(tasks.len() * buckets.len() * n);
    for &task in tasks {
        for &bucket in buckets {
            for index in 0..n as u64 {
                out.push(generate_one(ctx, task, bucket, index)?);
            }
        }
    }
    Ok(out)
}
