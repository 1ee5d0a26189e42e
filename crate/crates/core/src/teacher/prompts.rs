//! Prompt texts sent to the teacher backends.
//!
//! These prompts are original to this project. Each operation has a fixed
//! system prompt; the deterministic mock transport dispatches on them, so
//! changing one here means updating the mock's matching arm too.

use crate::types::{Category, SeedTask, TaskType};

pub const GENERATOR_SYSTEM: &str = "You create new Bengali instruction tasks. Study the example \
tasks, then write the requested number of fresh, self-contained instructions in Bengali. Every \
instruction must be entirely in Bengali. Reply with a numbered list only: one instruction per \
line in the form \"1. ...\", with no commentary before or after.";

pub const CLASSIFY_SYSTEM: &str = "You label Bengali instructions with their expected answer \
style. Reply with exactly one token and nothing else: open_ended, classification, or generation.";

pub const DRAFT_SYSTEM: &str = "You write one comprehensive response in Bengali to the given \
instruction. Match the requested task type, keep the response entirely in Bengali (code blocks \
are allowed for programming tasks), and reply with the response text only.";

pub const JUDGE_SYSTEM: &str = "You are a strict quality judge for Bengali instruction-response \
pairs. Score the pair and reply with exactly one JSON object, no other text, with these fields: \
grammar (0 to 1), bias (-1 to 1, 0 neutral), coherence (0 to 1), factual (bool), format_ok \
(bool), regional_ok (bool), gender_ok (bool), political_ok (bool), task_type (one of \
open_ended, classification, generation), complexity (one of basic, intermediate, advanced). \
grammar below 0.8, coherence below 0.8, or bias outside [-0.1, 0.1] mean the pair will be \
discarded; judge accordingly and do not inflate scores.";

/// Reminder sent on the single re-ask after a malformed reply.
pub const REPLY_FORMAT_REMINDER: &str =
    "Your previous reply did not match the required format. Follow the format instructions exactly.";

pub fn generation_user(
    seeds: &[SeedTask],
    category: Category,
    batch_size: usize,
    round: u64,
) -> String {
    let mut prompt = String::new();
    prompt.push_str(&format!("Round: {round}\n"));
    prompt.push_str(&format!("Category: {} ({})\n", category, category.label()));
    prompt.push_str(&format!("Count: {batch_size}\n"));
    prompt.push_str("Example tasks:\n");
    for seed in seeds {
        prompt.push_str(&format!("- {}\n", seed.text));
    }
    prompt.push_str(&format!(
        "Write {batch_size} new Bengali instructions for this category, numbered 1 to {batch_size}."
    ));
    prompt
}

pub fn classify_user(instruction: &str) -> String {
    format!("Instruction:\n{instruction}")
}

pub fn draft_user(
    instruction: &str,
    category: Category,
    task_type: TaskType,
    variant: usize,
    draft_count: usize,
) -> String {
    format!(
        "Category: {category}\nTask type: {task_type}\nDraft: {variant} of {draft_count}\nInstruction:\n{instruction}"
    )
}

pub fn judge_user(instruction: &str, response: &str) -> String {
    format!("Instruction:\n{instruction}\n\nResponse:\n{response}")
}
