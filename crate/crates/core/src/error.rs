use thiserror::Error;

/// Failures while generating an instance.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
    #[error("generation exhausted after {attempts} attempts: {what}")]
    GenerationExhausted { what: String, attempts: usize },
    #[error("fixed prompt content is {base_tokens} tokens, too long for target {target_tokens}")]
    TargetTooSmall {
        base_tokens: usize,
        target_tokens: usize,
    },
    #[error("could not fit prompt to target: got {achieved} tokens for target {target_tokens}")]
    LengthMiss {
        achieved: usize,
        target_tokens: usize,
    },
    #[error("writing pool exhausted: {0}")]
    PoolExhausted(String),
    #[error("internal generator error: {0}")]
    Internal(String),
}
