//! Multi-round co-reference resolution.

pub mod generate;
pub mod pool;
pub mod score;

pub use generate::{
    assemble_mrcr_instance, conversation_from_instance, ordinal_suffix, query_line, resolve_key,
    user_request, Conversation, Turn, WritingKey, EXAMPLES_HEADER, PREFIX_LEN,
};
pub use pool::{ExternalPool, SharedPool, TemplatedPool, WritingPool};
pub use score::{
    conversation_chance, mrcr_chance_rate, mrcr_score, mrcr_score_with, Histogram, MrcrChance,
    MrcrChanceMode, MRCR_SIMILARITY,
};
