//! Seeded generators, exact scorers and an evaluation harness for three
//! long-context tasks built on latent structures: Latent List, MRCR and IDK.

pub mod cli;
pub mod config;
pub mod error;
pub mod harness;
pub mod idk;
pub mod instance;
pub mod latent_list;
pub mod mrcr;
pub mod report;
pub mod rng;
pub mod stats;
pub mod suite;
pub mod textsim;
pub mod tokenizer;

pub use error::GenError;
pub use instance::{ContextBucket, TaskInstance, TaskKind};
pub use rng::{derive_rng, RngStream};
pub use tokenizer::{HeuristicTokenizer, Tokenizer};
