//! Shared domain types and their validation.
//!
//! Everything here is an immutable value once constructed; instances are safe
//! to clone, share, and send across tasks. The JSONL record schema for
//! [`InstructPair`] is part of the public interface: one JSON object per
//! line, UTF-8, with the exact field names produced by the serde derives
//! below (`report` and `verdict` for the nested objects).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// The ten seed-task categories, serialized as `"c1"` through `"c10"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    /// Cultural knowledge and heritage.
    #[serde(rename = "c1")]
    C1,
    /// Academic writing.
    #[serde(rename = "c2")]
    C2,
    /// Mathematical problem solving.
    #[serde(rename = "c3")]
    C3,
    /// Programming and technical.
    #[serde(rename = "c4")]
    C4,
    /// Creative writing.
    #[serde(rename = "c5")]
    C5,
    /// Scientific explanation.
    #[serde(rename = "c6")]
    C6,
    /// Business and economics.
    #[serde(rename = "c7")]
    C7,
    /// Social issues analysis.
    #[serde(rename = "c8")]
    C8,
    /// Data analysis and statistics.
    #[serde(rename = "c9")]
    C9,
    /// Language and translation.
    #[serde(rename = "c10")]
    C10,
}

impl Category {
    pub const ALL: [Category; 10] = [
        Category::C1,
        Category::C2,
        Category::C3,
        Category::C4,
        Category::C5,
        Category::C6,
        Category::C7,
        Category::C8,
        Category::C9,
        Category::C10,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Category::C1 => "c1",
            Category::C2 => "c2",
            Category::C3 => "c3",
            Category::C4 => "c4",
            Category::C5 => "c5",
            Category::C6 => "c6",
            Category::C7 => "c7",
            Category::C8 => "c8",
            Category::C9 => "c9",
            Category::C10 => "c10",
        }
    }

    /// Human-readable topic used in generation prompts.
    pub fn label(&self) -> &'static str {
        match self {
            Category::C1 => "cultural knowledge and heritage",
            Category::C2 => "academic writing",
            Category::C3 => "mathematical problem solving",
            Category::C4 => "programming and technical",
            Category::C5 => "creative writing",
            Category::C6 => "scientific explanation",
            Category::C7 => "business and economics",
            Category::C8 => "social issues analysis",
            Category::C9 => "data analysis and statistics",
            Category::C10 => "language and translation",
        }
    }

    pub fn parse(s: &str) -> Option<Category> {
        Category::ALL.iter().copied().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Task difficulty level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Complexity {
    Basic,
    Intermediate,
    Advanced,
}

impl Complexity {
    pub const ALL: [Complexity; 3] = [
        Complexity::Basic,
        Complexity::Intermediate,
        Complexity::Advanced,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Complexity::Basic => "basic",
            Complexity::Intermediate => "intermediate",
            Complexity::Advanced => "advanced",
        }
    }
}

impl fmt::Display for Complexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where a seed task came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    /// Authored by a human curator.
    Human,
    /// Absorbed from an accepted generated pair.
    Bootstrapped,
}

/// Answer style assigned to an instruction by the judge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskType {
    OpenEnded,
    Classification,
    Generation,
}

impl TaskType {
    pub const ALL: [TaskType; 3] = [
        TaskType::OpenEnded,
        TaskType::Classification,
        TaskType::Generation,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TaskType::OpenEnded => "open_ended",
            TaskType::Classification => "classification",
            TaskType::Generation => "generation",
        }
    }

    pub fn parse(s: &str) -> Option<TaskType> {
        TaskType::ALL.iter().copied().find(|t| t.as_str() == s)
    }
}

impl fmt::Display for TaskType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A human-authored (or absorbed) instruction; the unit of the bootstrap pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedTask {
    pub id: String,
    pub text: String,
    pub category: Category,
    pub complexity: Complexity,
    pub origin: Origin,
}

/// An instruction proposed by the generator, before typing and drafting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstructionCandidate {
    pub id: String,
    pub text: String,
    pub category: Category,
    /// Generation round the candidate was produced in; ≥ 1 for generated
    /// candidates.
    pub round: u64,
    /// Set once the judge has classified the instruction.
    pub task_type: Option<TaskType>,
}

/// One response draft with the coherence score the judge gave it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseDraft {
    pub text: String,
    /// Coherence between instruction and draft, in [0, 1].
    pub coherence: f64,
}

/// Structured scores returned by the judge for an instruction-response pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeVerdict {
    /// Grammar score in [0, 1].
    pub grammar: f64,
    /// Bias score in [-1, 1]; 0 is neutral.
    pub bias: f64,
    /// Coherence score in [0, 1].
    pub coherence: f64,
    pub factual: bool,
    pub format_ok: bool,
    pub regional_ok: bool,
    pub gender_ok: bool,
    pub political_ok: bool,
    pub task_type: TaskType,
    pub complexity: Complexity,
}

/// Machine-readable failure codes attached to a [`FilterReport`].
///
/// This is a closed enumeration: tests assert on these exact values and the
/// JSONL schema serializes them as the snake_case strings below.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReasonCode {
    // Language (L)
    NoWords,
    WordRatioBelowThreshold,
    UnicodeInconsistent,
    GrammarBelowThreshold,
    // Cultural (C)
    ReligiousBias,
    RegionalBias,
    GenderBias,
    PoliticalBias,
    // Quality (Q)
    TooShort,
    CoherenceBelowThreshold,
    NotFactual,
    BadFormat,
    // Novelty (N)
    TooSimilar,
    LowLexicalDiversity,
    DuplicateResponse,
}

/// Which of the four criteria a reason code belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Language,
    Cultural,
    Quality,
    Novelty,
}

impl ReasonCode {
    pub fn criterion(&self) -> Criterion {
        use ReasonCode::*;
        match self {
            NoWords | WordRatioBelowThreshold | UnicodeInconsistent | GrammarBelowThreshold => {
                Criterion::Language
            }
            ReligiousBias | RegionalBias | GenderBias | PoliticalBias => Criterion::Cultural,
            TooShort | CoherenceBelowThreshold | NotFactual | BadFormat => Criterion::Quality,
            TooSimilar | LowLexicalDiversity | DuplicateResponse => Criterion::Novelty,
        }
    }

    pub fn as_str(&self) -> &'static str {
        use ReasonCode::*;
        match self {
            NoWords => "no_words",
            WordRatioBelowThreshold => "word_ratio_below_threshold",
            UnicodeInconsistent => "unicode_inconsistent",
            GrammarBelowThreshold => "grammar_below_threshold",
            ReligiousBias => "religious_bias",
            RegionalBias => "regional_bias",
            GenderBias => "gender_bias",
            PoliticalBias => "political_bias",
            TooShort => "too_short",
            CoherenceBelowThreshold => "coherence_below_threshold",
            NotFactual => "not_factual",
            BadFormat => "bad_format",
            TooSimilar => "too_similar",
            LowLexicalDiversity => "low_lexical_diversity",
            DuplicateResponse => "duplicate_response",
        }
    }
}

impl fmt::Display for ReasonCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-criterion outcomes of the acceptance filter plus the conjunction.
///
/// `measurements` holds the numeric values the criteria were judged on
/// (`word_ratio`, `grammar`, `bias`, `length`, `coherence`, `max_similarity`,
/// `ttr`). Keys are absent when the metric could not be computed (for
/// example `word_ratio` on text with no word tokens). A `BTreeMap` keeps the
/// serialized form deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub language_ok: bool,
    pub cultural_ok: bool,
    pub quality_ok: bool,
    pub novelty_ok: bool,
    pub accepted: bool,
    pub reasons: Vec<ReasonCode>,
    pub measurements: BTreeMap<String, f64>,
}

impl FilterReport {
    /// True iff `accepted` equals the conjunction of the four criterion flags.
    pub fn conjunction_consistent(&self) -> bool {
        self.accepted == (self.language_ok && self.cultural_ok && self.quality_ok && self.novelty_ok)
    }
}

/// An accepted (or candidate) instruction-response pair with full provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstructPair {
    pub id: String,
    pub instruction: String,
    pub response: String,
    pub task_type: TaskType,
    pub category: Category,
    pub complexity: Complexity,
    pub round: u64,
    #[serde(rename = "report")]
    pub filter_report: FilterReport,
    pub verdict: JudgeVerdict,
}

/// Violations reported by [`validate_pair`]. Closed enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationCode {
    EmptyInstruction,
    EmptyResponse,
    ScoreOutOfRange,
    ConjunctionViolated,
    MissingReason,
    RoundOutOfRange,
}

impl ViolationCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ViolationCode::EmptyInstruction => "empty_instruction",
            ViolationCode::EmptyResponse => "empty_response",
            ViolationCode::ScoreOutOfRange => "score_out_of_range",
            ViolationCode::ConjunctionViolated => "conjunction_violated",
            ViolationCode::MissingReason => "missing_reason",
            ViolationCode::RoundOutOfRange => "round_out_of_range",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn score_in(value: f64, lo: f64, hi: f64) -> bool {
    value.is_finite() && value >= lo && value <= hi
}

/// Check every type invariant of a pair; returns one code per violation.
///
/// Total, deterministic, and side-effect free. Pair-local only: whether a
/// rejected pair may sit in an accepted dataset is a dataset-level question
/// answered by the re-verification pass in [`crate::pipeline`].
pub fn validate_pair(pair: &InstructPair) -> Vec<ViolationCode> {
    let mut violations = Vec::new();

    if pair.instruction.trim().is_empty() {
        violations.push(ViolationCode::EmptyInstruction);
    }
    if pair.response.trim().is_empty() {
        violations.push(ViolationCode::EmptyResponse);
    }

    let v = &pair.verdict;
    if !(score_in(v.grammar, 0.0, 1.0) && score_in(v.bias, -1.0, 1.0) && score_in(v.coherence, 0.0, 1.0))
    {
        violations.push(ViolationCode::ScoreOutOfRange);
    }

    if !pair.filter_report.conjunction_consistent() {
        violations.push(ViolationCode::ConjunctionViolated);
    }

    let report = &pair.filter_report;
    let flag_for = |criterion: Criterion| match criterion {
        Criterion::Language => report.language_ok,
        Criterion::Cultural => report.cultural_ok,
        Criterion::Quality => report.quality_ok,
        Criterion::Novelty => report.novelty_ok,
    };
    let missing = [
        Criterion::Language,
        Criterion::Cultural,
        Criterion::Quality,
        Criterion::Novelty,
    ]
    .into_iter()
    .any(|criterion| {
        !flag_for(criterion) && !report.reasons.iter().any(|r| r.criterion() == criterion)
    });
    if missing {
        violations.push(ViolationCode::MissingReason);
    }

    if pair.round < 1 {
        violations.push(ViolationCode::RoundOutOfRange);
    }

    violations
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn passing_verdict() -> JudgeVerdict {
        JudgeVerdict {
            grammar: 0.9,
            bias: 0.0,
            coherence: 0.85,
            factual: true,
            format_ok: true,
            regional_ok: true,
            gender_ok: true,
            political_ok: true,
            task_type: TaskType::Generation,
            complexity: Complexity::Basic,
        }
    }

    pub(crate) fn passing_report() -> FilterReport {
        FilterReport {
            language_ok: true,
            cultural_ok: true,
            quality_ok: true,
            novelty_ok: true,
            accepted: true,
            reasons: vec![],
            measurements: BTreeMap::new(),
        }
    }

    fn sample_pair() -> InstructPair {
        InstructPair {
            id: "r1-0".to_string(),
            instruction: "বাংলা নববর্ষ সম্পর্কে লিখুন।".to_string(),
            response: "পহেলা বৈশাখ বাংলা বছরের প্রথম দিন।".to_string(),
            task_type: TaskType::Generation,
            category: Category::C1,
            complexity: Complexity::Basic,
            round: 1,
            filter_report: passing_report(),
            verdict: passing_verdict(),
        }
    }

    #[test]
    fn well_formed_pair_has_no_violations() {
        assert!(validate_pair(&sample_pair()).is_empty());
    }

    #[test]
    fn accepted_with_failed_criterion_is_conjunction_violation() {
        let mut pair = sample_pair();
        pair.filter_report.novelty_ok = false;
        pair.filter_report.reasons = vec![ReasonCode::TooSimilar];
        assert_eq!(
            validate_pair(&pair),
            vec![ViolationCode::ConjunctionViolated]
        );
    }

    #[test]
    fn out_of_range_coherence_is_flagged() {
        let mut pair = sample_pair();
        pair.verdict.coherence = 1.3;
        assert_eq!(validate_pair(&pair), vec![ViolationCode::ScoreOutOfRange]);
    }

    #[test]
    fn failed_criterion_without_reason_is_flagged() {
        let mut pair = sample_pair();
        pair.filter_report.quality_ok = false;
        pair.filter_report.accepted = false;
        assert_eq!(validate_pair(&pair), vec![ViolationCode::MissingReason]);
    }

    #[test]
    fn round_zero_is_out_of_range() {
        let mut pair = sample_pair();
        pair.round = 0;
        assert_eq!(validate_pair(&pair), vec![ViolationCode::RoundOutOfRange]);
    }

    #[test]
    fn nan_scores_are_out_of_range() {
        let mut pair = sample_pair();
        pair.verdict.bias = f64::NAN;
        assert_eq!(validate_pair(&pair), vec![ViolationCode::ScoreOutOfRange]);
    }

    #[test]
    fn jsonl_schema_field_names_are_stable() {
        // The line format writes fields in declaration order.
        let line = serde_json::to_string(&sample_pair()).unwrap();
        let expected_order = [
            "\"id\":",
            "\"instruction\":",
            "\"response\":",
            "\"task_type\":",
            "\"category\":",
            "\"complexity\":",
            "\"round\":",
            "\"report\":",
            "\"verdict\":",
        ];
        let positions: Vec<usize> = expected_order
            .iter()
            .map(|field| line.find(field).unwrap_or_else(|| panic!("missing {field}")))
            .collect();
        assert!(
            positions.windows(2).all(|w| w[0] < w[1]),
            "fields out of order in {line}"
        );

        let value: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(value["task_type"], "generation");
        assert_eq!(value["category"], "c1");
        assert_eq!(value["complexity"], "basic");
    }

    #[test]
    fn core_types_are_shareable_across_tasks() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<SeedTask>();
        assert_send_sync::<InstructionCandidate>();
        assert_send_sync::<ResponseDraft>();
        assert_send_sync::<JudgeVerdict>();
        assert_send_sync::<FilterReport>();
        assert_send_sync::<InstructPair>();
    }

    #[test]
    fn category_round_trips_through_strings() {
        for category in Category::ALL {
            assert_eq!(Category::parse(category.as_str()), Some(category));
            let json = serde_json::to_string(&category).unwrap();
            assert_eq!(json, format!("\"{}\"", category.as_str()));
        }
        assert_eq!(Category::parse("c11"), None);
    }

    proptest::proptest! {
        /// accepted must equal the conjunction for every flag combination.
        #[test]
        fn conjunction_rule_over_random_flags(
            l in proptest::bool::ANY,
            c in proptest::bool::ANY,
            q in proptest::bool::ANY,
            n in proptest::bool::ANY,
            accepted in proptest::bool::ANY,
        ) {
            let report = FilterReport {
                language_ok: l,
                cultural_ok: c,
                quality_ok: q,
                novelty_ok: n,
                accepted,
                reasons: vec![],
                measurements: BTreeMap::new(),
            };
            proptest::prop_assert_eq!(
                report.conjunction_consistent(),
                accepted == (l && c && q && n)
            );
        }
    }
}
