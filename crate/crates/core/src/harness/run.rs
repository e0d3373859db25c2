//! Bounded-concurrency evaluation loop with retries and resume.

use std::collections::HashSet;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use super::client::{GenParams, GenRequest, ModelClient};
use super::sink::{EvalRecord, JsonlSink, SinkError};
use crate::instance::TaskInstance;
use crate::rng::derive_rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Backoff {
    pub base: Duration,
    pub cap: Duration,
    /// Scale each delay by a uniform factor in [0.5, 1].
    pub jitter: bool,
}

impl Default for Backoff {
    fn default() -> Self {
        Backoff {
            base: Duration::from_secs(2),
            cap: Duration::from_secs(60),
            jitter: true,
        }
    }
}

impl Backoff {
    /// Delay before retry number `retry` (1-based).
    pub fn delay(&self, retry: u32, rng: &mut impl Rng) -> Duration {
        let exp = self
            .base
            .saturating_mul(1u32 << retry.saturating_sub(1).min(20));
        let d = exp.min(self.cap);
        if self.jitter {
            d.mul_f64(rng.random_range(0.5..=1.0))
        } else {
            d
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub max_in_flight: usize,
    pub retries: u32,
    pub params: GenParams,
    pub backoff: Backoff,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            max_in_flight: 4,
            retries: 3,
            params: GenParams::default(),
            backoff: Backoff::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RunSummary {
    pub total: usize,
    /// Instances that already had a successful record.
    pub skipped: usize,
    /// Generation calls made, retries included.
    pub requests_issued: usize,
    pub succeeded: usize,
    pub failed: Vec<String>,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid run options: {0}")]
    InvalidOptions(String),
    #[error(transparent)]
    Sink(#[from] SinkError),
}

struct Outcome {
    record: EvalRecord,
    calls: usize,
}

fn evaluate(client: &dyn ModelClient, inst: &TaskInstance, opts: &RunOptions) -> Outcome {
    let mut rng = derive_rng(inst.seed, 0, &format!("backoff/{}", inst.id));
    let mut attempt = 0;
    loop {
        attempt += 1;
        let started = Instant::now();
        let req = GenRequest {
            prompt: &inst.prompt,
            params: &opts.params,
            instance: Some(inst),
        };
        let result = client.generate(&req);
        let latency_ms = started.elapsed().as_millis() as u64;
        let record = |raw_output: String, error: Option<String>| EvalRecord {
            instance_id: inst.id.clone(),
            model_id: client.id().to_owned(),
            raw_output,
            latency_ms,
            attempt,
            error,
        };
        match result {
            Ok(text) => {
                return Outcome {
                    record: record(text, None),
                    calls: attempt as usize,
                }
            }
            Err(e) if e.is_retryable() && attempt <= opts.retries => {
                std::thread::sleep(opts.backoff.delay(attempt, &mut rng));
            }
            Err(e) => {
                return Outcome {
                    record: record(String::new(), Some(e.to_string())),
                    calls: attempt as usize,
                }
            }
        }
    }
}

/// Runs every instance lacking a successful record for this client through it.
pub fn run_eval(
    instances: &[TaskInstance],
    client: &dyn ModelClient,
    opts: &RunOptions,
    sink: &mut JsonlSink,
) -> Result<RunSummary, RunError> {
    if opts.max_in_flight == 0 {
        return Err(RunError::InvalidOptions(
            "max_in_flight must be at least 1".into(),
        ));
    }
    for kind in instances.iter().map(|i| i.kind).collect::<HashSet<_>>() {
        opts.params
            .check_for(kind)
            .map_err(RunError::InvalidOptions)?;
    }
    let done: HashSet<&str> = sink
        .existing()
        .iter()
        .filter(|r| r.is_success() && r.model_id == client.id())
        .map(|r| r.instance_id.as_str())
        .collect();
    let pending: Vec<&TaskInstance> = instances
        .iter()
        .filter(|i| !done.contains(i.id.as_str()))
        .collect();
    let mut summary = RunSummary {
        total: instances.len(),
        skipped: instances.len() - pending.len(),
        ..Default::default()
    };
    if pending.is_empty() {
        return Ok(summary);
    }

    let next = AtomicUsize::new(0);
    let workers = opts.max_in_flight.min(pending.len());
    let (tx, rx) = mpsc::channel::<Outcome>();
    let mut sink_result = Ok(());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let (next, pending) = (&next, &pending);
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(inst) = pending.get(i) else { break };
                if tx.send(evaluate(client, inst, opts)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for outcome in rx {
            summary.requests_issued += outcome.calls;
            if outcome.record.is_success() {
                summary.succeeded += 1;
            } else {
                summary.failed.push(outcome.record.instance_id.clone());
            }
            if sink_result.is_ok() {
                sink_result = sink.append(&outcome.record);
                if sink_result.is_err() {
                    // Stop handing out work; in-flight calls drain.
                    next.store(usize::MAX / 2, Ordering::Relaxed);
                }
            }
        }
    });
    sink_result?;
    summary.failed.sort();
    Ok(summary)
}
