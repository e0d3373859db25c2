//! Latent List: a Python list mutated by a long stream of operations, most of
//! which provably leave it unchanged, followed by a view query.

pub mod chance;
pub mod generate;
pub mod program;
pub mod prompt;
pub mod score;

pub use chance::{latent_list_chance_rate, ChanceEstimate};
pub use generate::{
    assemble_latent_list_instance, gen_filler_block, gen_relevant_ops, program_from_instance,
    sample_view, FillerStrategy, COMPLEXITY_LEVELS,
};
pub use program::{
    apply_op, eval_view, render_list, run_program, ListAnswer, ListError, ListOp, ListProgram,
    ProgramOp, ViewKind, ViewOp, INITIAL_LIST,
};
pub use score::{latent_list_score, parse_latent_list_answer, ParsedAnswer};
