//! The four-criteria acceptance filter: Language, Cultural, Quality, Novelty.
//!
//! A pair is accepted iff all four criteria pass. [`accept`] runs every
//! criterion unconditionally so reports carry the complete picture even when
//! an early criterion fails.

pub mod metrics;
pub mod novelty;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::types::{FilterReport, JudgeVerdict, ReasonCode, TaskType};
use metrics::{
    bengali_word_ratio, type_token_ratio, unicode_consistency, word_count, MetricError,
};
pub use novelty::{NoveltyError, NoveltyIndex};

/// Minimum response word count per task type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LengthPolicy {
    pub open_ended: usize,
    pub classification: usize,
    pub generation: usize,
}

impl Default for LengthPolicy {
    fn default() -> Self {
        LengthPolicy {
            open_ended: 50,
            classification: 5,
            generation: 80,
        }
    }
}

impl LengthPolicy {
    pub fn min_words(&self, task_type: TaskType) -> usize {
        match task_type {
            TaskType::OpenEnded => self.open_ended,
            TaskType::Classification => self.classification,
            TaskType::Generation => self.generation,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.open_ended >= 1 && self.classification >= 1 && self.generation >= 1
    }
}

/// The filter threshold set. Defaults are the reference operating point:
/// word ratio ≥ 0.95, grammar ≥ 0.8, |bias| ≤ 0.1, coherence ≥ 0.8,
/// similarity ≤ 0.7, type-token ratio ≥ 0.4.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub min_word_ratio: f64,
    pub min_grammar: f64,
    pub bias_bound: f64,
    pub min_coherence: f64,
    pub max_similarity: f64,
    pub min_ttr: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            min_word_ratio: 0.95,
            min_grammar: 0.8,
            bias_bound: 0.1,
            min_coherence: 0.8,
            max_similarity: 0.7,
            min_ttr: 0.4,
        }
    }
}

/// Result of one criterion: pass/fail, failure reasons, measured values.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub passed: bool,
    pub reasons: Vec<ReasonCode>,
    pub measurements: BTreeMap<String, f64>,
}

impl CriterionOutcome {
    fn pass() -> Self {
        CriterionOutcome {
            passed: true,
            reasons: Vec::new(),
            measurements: BTreeMap::new(),
        }
    }

    fn fail(&mut self, reason: ReasonCode) {
        self.passed = false;
        self.reasons.push(reason);
    }

    fn measure(&mut self, key: &str, value: f64) {
        self.measurements.insert(key.to_string(), value);
    }
}

/// Language adherence: Bengali word ratio over instruction and response
/// joined with one space, Unicode consistency of both texts, and the judge's
/// grammar score.
pub fn language_filter(
    instruction: &str,
    response: &str,
    verdict: &JudgeVerdict,
    thresholds: &Thresholds,
) -> CriterionOutcome {
    let mut outcome = CriterionOutcome::pass();

    let joined = format!("{instruction} {response}");
    match bengali_word_ratio(&joined) {
        Ok(ratio) => {
            outcome.measure("word_ratio", ratio);
            if ratio < thresholds.min_word_ratio {
                outcome.fail(ReasonCode::WordRatioBelowThreshold);
            }
        }
        Err(MetricError::NoWords) => outcome.fail(ReasonCode::NoWords),
        Err(MetricError::EmptyText) => outcome.fail(ReasonCode::NoWords),
    }

    if !unicode_consistency(instruction) || !unicode_consistency(response) {
        outcome.fail(ReasonCode::UnicodeInconsistent);
    }

    outcome.measure("grammar", verdict.grammar);
    if verdict.grammar < thresholds.min_grammar {
        outcome.fail(ReasonCode::GrammarBelowThreshold);
    }

    outcome
}

/// Cultural sensitivity: bias within the closed interval [-bound, bound]
/// and all neutrality flags set.
pub fn cultural_filter(verdict: &JudgeVerdict, thresholds: &Thresholds) -> CriterionOutcome {
    let mut outcome = CriterionOutcome::pass();
    outcome.measure("bias", verdict.bias);
    if !(verdict.bias >= -thresholds.bias_bound && verdict.bias <= thresholds.bias_bound) {
        outcome.fail(ReasonCode::ReligiousBias);
    }
    if !verdict.regional_ok {
        outcome.fail(ReasonCode::RegionalBias);
    }
    if !verdict.gender_ok {
        outcome.fail(ReasonCode::GenderBias);
    }
    if !verdict.political_ok {
        outcome.fail(ReasonCode::PoliticalBias);
    }
    outcome
}

/// Content quality: response length against the per-task-type minimum,
/// coherence, factuality, and format adherence.
pub fn quality_filter(
    _instruction: &str,
    response: &str,
    task_type: TaskType,
    verdict: &JudgeVerdict,
    policy: &LengthPolicy,
    thresholds: &Thresholds,
) -> CriterionOutcome {
    let mut outcome = CriterionOutcome::pass();

    let length = word_count(response);
    outcome.measure("length", length as f64);
    if length < policy.min_words(task_type) {
        outcome.fail(ReasonCode::TooShort);
    }

    outcome.measure("coherence", verdict.coherence);
    if verdict.coherence < thresholds.min_coherence {
        outcome.fail(ReasonCode::CoherenceBelowThreshold);
    }

    if !verdict.factual {
        outcome.fail(ReasonCode::NotFactual);
    }
    if !verdict.format_ok {
        outcome.fail(ReasonCode::BadFormat);
    }

    outcome
}

/// Novelty: maximum trigram similarity against the index, lexical diversity
/// of the joined pair, and response uniqueness within the category.
pub fn novelty_filter(
    instruction: &str,
    response: &str,
    category: crate::types::Category,
    index: &NoveltyIndex,
    thresholds: &Thresholds,
) -> CriterionOutcome {
    let mut outcome = CriterionOutcome::pass();

    let max_sim = index.max_similarity(instruction);
    outcome.measure("max_similarity", max_sim);
    if max_sim > thresholds.max_similarity {
        outcome.fail(ReasonCode::TooSimilar);
    }

    let joined = format!("{instruction} {response}");
    match type_token_ratio(&joined) {
        Ok(ttr) => {
            outcome.measure("ttr", ttr);
            if ttr < thresholds.min_ttr {
                outcome.fail(ReasonCode::LowLexicalDiversity);
            }
        }
        Err(_) => outcome.fail(ReasonCode::LowLexicalDiversity),
    }

    if index.has_duplicate_response(category, response) {
        outcome.fail(ReasonCode::DuplicateResponse);
    }

    outcome
}

/// Run all four criteria and combine them into a [`FilterReport`].
///
/// No short-circuiting: every criterion runs so the report is complete.
/// On acceptance the caller is responsible for inserting the pair into the
/// novelty index.
#[allow(clippy::too_many_arguments)]
pub fn accept(
    instruction: &str,
    response: &str,
    task_type: TaskType,
    category: crate::types::Category,
    verdict: &JudgeVerdict,
    index: &NoveltyIndex,
    policy: &LengthPolicy,
    thresholds: &Thresholds,
) -> FilterReport {
    let language = language_filter(instruction, response, verdict, thresholds);
    let cultural = cultural_filter(verdict, thresholds);
    let quality = quality_filter(instruction, response, task_type, verdict, policy, thresholds);
    let novelty = novelty_filter(instruction, response, category, index, thresholds);

    let mut reasons = Vec::new();
    let mut measurements = BTreeMap::new();
    for outcome in [&language, &cultural, &quality, &novelty] {
        reasons.extend(outcome.reasons.iter().copied());
        measurements.extend(outcome.measurements.clone());
    }

    FilterReport {
        language_ok: language.passed,
        cultural_ok: cultural.passed,
        quality_ok: quality.passed,
        novelty_ok: novelty.passed,
        accepted: language.passed && cultural.passed && quality.passed && novelty.passed,
        reasons,
        measurements,
    }
}
