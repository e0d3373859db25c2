//! Questions whose answer may be absent from the context.

pub mod generate;
pub mod score;
pub mod templates;

pub use generate::{
    assemble_idk_instance, assemble_idk_instance_with, choices_from_instance, render_question,
    sample_answerable, sample_story, story_is_valid, IdkOptions, StorySpec, ANSWERABLE_FRACTION,
    IDK_CHOICE, LETTERS,
};
pub use score::{extract_choice, idk_chance_rate, idk_score, is_abstention, ABSTENTION_PATTERNS};
