//! Model client interface and its error taxonomy.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{TaskInstance, TaskKind};

/// Smallest output budget that fits a full MRCR answer (targets run to 512 tokens).
pub const MRCR_MIN_OUTPUT_TOKENS: u32 = 600;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenParams {
    pub max_output_tokens: u32,
    pub temperature: f64,
    pub stop: Vec<String>,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            max_output_tokens: 1024,
            temperature: 0.0,
            stop: Vec::new(),
        }
    }
}

impl GenParams {
    pub fn check_for(&self, kind: TaskKind) -> Result<(), String> {
        if kind == TaskKind::Mrcr && self.max_output_tokens < MRCR_MIN_OUTPUT_TOKENS {
            return Err(format!(
                "max_output_tokens {} is below {MRCR_MIN_OUTPUT_TOKENS}, too small for mrcr",
                self.max_output_tokens
            ));
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(format!("temperature {} outside [0, 2]", self.temperature));
        }
        Ok(())
    }
}

/// One generation call. `instance` is a side channel for mock clients.
#[derive(Debug, Clone, Copy)]
pub struct GenRequest<'a> {
    pub prompt: &'a str,
    pub params: &'a GenParams,
    pub instance: Option<&'a TaskInstance>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ClientError {
    #[error("transport error{}: {message}", .status.map(|s| format!(" (HTTP {s})")).unwrap_or_default())]
    Transport {
        status: Option<u16>,
        message: String,
        retryable: bool,
    },
    #[error("protocol error: {message}; body excerpt: {excerpt:?}")]
    Protocol { message: String, excerpt: String },
    #[error("client configuration error: {0}")]
    Config(String),
}

impl ClientError {
    pub fn is_retryable(&self) -> bool {
        matches!(
            self,
            ClientError::Transport {
                retryable: true,
                ..
            }
        )
    }

    /// Classifies an HTTP error status: 408, 429 and 5xx are transient.
    pub fn from_status(status: u16, body: &str) -> ClientError {
        let retryable = status == 408 || status == 429 || (500..600).contains(&status);
        ClientError::Transport {
            status: Some(status),
            message: excerpt(body),
            retryable,
        }
    }
}

pub(crate) fn excerpt(body: &str) -> String {
    const MAX: usize = 200;
    match body.char_indices().nth(MAX) {
        Some((i, _)) => format!("{}...", &body[..i]),
        None => body.to_owned(),
    }
}

/// A text-generation backend. Implementations are shared across worker threads.
pub trait ModelClient: Send + Sync {
    fn id(&self) -> &str;
    fn generate(&self, req: &GenRequest<'_>) -> Result<String, ClientError>;
}
