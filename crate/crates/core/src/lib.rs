//! Bootstrapping engine for Bengali instruction-response datasets.
//!
//! The crate grows a small human-curated seed pool into a large instruction
//! dataset: seeds are sampled each round, a generator teacher proposes new
//! instructions, a judge teacher types and scores them, and a four-criteria
//! filter (language, cultural, quality, novelty) decides what is kept.
//! Accepted pairs feed back into the pool until the target dataset size is
//! reached. Corpus statistics and a Pass@1 evaluation harness round out the
//! toolkit.
//!
//! Entry points:
//! - [`seedpool`]: load, validate, and sample the seed pool.
//! - [`teacher`]: generator/judge backends (HTTP or deterministic mock).
//! - [`filters`]: text metrics and the acceptance filter.
//! - [`pipeline`]: the generation loop with checkpoint/resume.
//! - [`analytics`]: corpus and dataset statistics.
//! - [`eval`]: Pass@1 benchmark harness.
//! - [`cli`]: the `instructgen` command-line front end.

pub mod analytics;
pub mod cli;
pub mod config;
pub mod eval;
pub mod filters;
pub mod pipeline;
pub mod seedpool;
pub mod teacher;
pub mod types;

pub use types::{
    Category, Complexity, FilterReport, InstructPair, InstructionCandidate, JudgeVerdict, Origin,
    ReasonCode, ResponseDraft, SeedTask, TaskType,
};
