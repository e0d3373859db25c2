//! Scores, curves, stratified means, correlations and report files.

pub mod corr;
pub mod curve;
pub mod emit;
pub mod score;

use std::path::PathBuf;

use thiserror::Error;

use crate::instance::{ContextBucket, TaskKind};

pub use corr::{average_ranks, cross_task_correlation, spearman, CorrelationMatrix};
pub use curve::{cumulative_curve, quantile_grid, stratified_union, CurvePoint};
pub use emit::{
    emit_report, report_rows, summarize, CurveRow, ReportFiles, ReportOptions, SliceBy, TaskSummary,
};
pub use score::{score_output, score_run, ScoreRecord, ERRORED_TAG};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ReportError {
    #[error("record refers to unknown instance {0}")]
    UnknownInstance(String),
    #[error("instance {id}: {message}")]
    BadInstance { id: String, message: String },
    #[error("subset {0} requested but not provided")]
    MissingSubset(ContextBucket),
    #[error("subset {subset} holds {id} with {tokens} tokens, beyond its range")]
    RangeOutsideSubset {
        subset: ContextBucket,
        id: String,
        tokens: usize,
    },
    #[error("model {model} has no score for task {task}")]
    MissingTask { model: String, task: TaskKind },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}
