//! The generation loop: sample → generate → type → draft → judge → filter →
//! absorb, with complexity-mix enforcement, checkpointing, and termination at
//! the target dataset size.
//!
//! Rounds are atomic: a teacher backend failure aborts the round and leaves
//! the state untouched apart from a recorded failure, so checkpoints are
//! always consistent. Within a round, candidate processing runs concurrently
//! (bounded by the teachers' in-flight limits); filtering and state mutation
//! happen in a serialized commit phase in candidate order, which keeps runs
//! bit-reproducible.

pub mod checkpoint;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filters::novelty::NoveltyError;
use crate::filters::{accept, LengthPolicy, NoveltyIndex, Thresholds};
use crate::seedpool::{
    absorb, sample_seeds, ComplexityTargets, SeedPool, SeedPoolError,
};
use crate::teacher::{
    classify_task, draft_responses, generate_instructions, judge_scores, select_draft,
    GenerationRequest, TeacherError, TeacherHandle,
};
use crate::types::{
    Category, Complexity, InstructPair, InstructionCandidate, JudgeVerdict, ReasonCode, TaskType,
};
pub use checkpoint::{resume, write_checkpoint, CheckpointError, CHECKPOINT_SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config_error: {0}")]
    Config(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Teacher(#[from] TeacherError),
    #[error(transparent)]
    SeedPool(#[from] SeedPoolError),
    #[error(transparent)]
    Novelty(#[from] NoveltyError),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error("io_error: {0}")]
    Io(#[from] std::io::Error),
}

/// Loop constants and filter settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Stop once this many pairs are accepted.
    pub target_pairs: usize,
    /// Seeds sampled per round.
    #[serde(default = "default_seeds_per_round")]
    pub seeds_per_round: usize,
    /// Candidates requested per round.
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    /// Response drafts per instruction.
    #[serde(default = "default_draft_count")]
    pub draft_count: usize,
    #[serde(default)]
    pub complexity_targets: ComplexityTargets,
    /// Allowed overshoot of a complexity bucket's share before deferral.
    #[serde(default = "default_complexity_tolerance")]
    pub complexity_tolerance: f64,
    /// Allowed overshoot of a task type's share above the uniform third.
    #[serde(default = "default_task_type_tolerance")]
    pub task_type_tolerance: f64,
    pub rng_seed: u64,
    /// Safety cap on round attempts; default 50 × (target / batch).
    #[serde(default)]
    pub max_rounds: Option<u64>,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub length_policy: LengthPolicy,
}

fn default_seeds_per_round() -> usize {
    8
}

fn default_batch_size() -> usize {
    20
}

fn default_draft_count() -> usize {
    3
}

fn default_complexity_tolerance() -> f64 {
    0.05
}

fn default_task_type_tolerance() -> f64 {
    0.15
}

impl PipelineConfig {
    pub fn new(target_pairs: usize, rng_seed: u64) -> Self {
        PipelineConfig {
            target_pairs,
            seeds_per_round: default_seeds_per_round(),
            batch_size: default_batch_size(),
            draft_count: default_draft_count(),
            complexity_targets: ComplexityTargets::default(),
            complexity_tolerance: default_complexity_tolerance(),
            task_type_tolerance: default_task_type_tolerance(),
            rng_seed,
            max_rounds: None,
            thresholds: Thresholds::default(),
            length_policy: LengthPolicy::default(),
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.target_pairs < 1 {
            return Err(PipelineError::Config("target_pairs must be ≥ 1".into()));
        }
        if self.seeds_per_round < 1 {
            return Err(PipelineError::Config("seeds_per_round must be ≥ 1".into()));
        }
        if self.batch_size < 1 {
            return Err(PipelineError::Config("batch_size must be ≥ 1".into()));
        }
        if self.draft_count < 1 {
            return Err(PipelineError::Config("draft_count must be ≥ 1".into()));
        }
        if !self.complexity_targets.sums_to_one() {
            return Err(PipelineError::Config(
                "complexity_targets must sum to 1".into(),
            ));
        }
        if self.complexity_tolerance < 0.0 || self.task_type_tolerance < 0.0 {
            return Err(PipelineError::Config("tolerances must be ≥ 0".into()));
        }
        if !self.length_policy.is_valid() {
            return Err(PipelineError::Config(
                "length_policy minimums must be ≥ 1".into(),
            ));
        }
        Ok(())
    }

    pub fn effective_max_rounds(&self) -> u64 {
        self.max_rounds.unwrap_or_else(|| {
            let per_round = self.batch_size.max(1) as u64;
            50 * (self.target_pairs as u64).div_ceil(per_round).max(1)
        })
    }
}

/// Accepted/rejected/deferred/errored tallies, broken down by reason,
/// category, complexity, and task type.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Counters {
    pub candidates: u64,
    pub accepted: u64,
    pub rejected: u64,
    pub deferred: u64,
    pub errored: u64,
    pub rejected_by_reason: BTreeMap<ReasonCode, u64>,
    pub accepted_per_category: BTreeMap<Category, u64>,
    pub accepted_per_complexity: BTreeMap<Complexity, u64>,
    pub accepted_per_task_type: BTreeMap<TaskType, u64>,
}

/// Audit record for one completed round. Conservation holds per round:
/// `candidates = accepted + rejected + deferred + errored`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    pub round: u64,
    pub target_category: Category,
    pub candidates: u64,
    pub accepted: u64,
    pub rejected: u64,
    pub deferred: u64,
    pub errored: u64,
}

/// The checkpointable unit: everything a run needs to continue.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineState {
    /// Completed (successful) rounds.
    pub round: u64,
    /// Rounds aborted by backend failures.
    pub failed_rounds: u64,
    pub pool: SeedPool,
    pub accepted: Vec<InstructPair>,
    pub index: NoveltyIndex,
    pub rng: ChaCha8Rng,
    pub counters: Counters,
    pub rounds: Vec<RoundReport>,
    pub failures: Vec<String>,
}

/// Build the initial state: the pool becomes the first novelty corpus.
pub fn init_state(config: &PipelineConfig, pool: SeedPool) -> Result<PipelineState, PipelineError> {
    config.validate()?;
    let mut index = NoveltyIndex::new();
    for task in pool.tasks() {
        index.insert(&task.id, task.category, &task.text, None)?;
    }
    Ok(PipelineState {
        round: 0,
        failed_rounds: 0,
        pool,
        accepted: Vec::new(),
        index,
        rng: ChaCha8Rng::seed_from_u64(config.rng_seed),
        counters: Counters::default(),
        rounds: Vec::new(),
        failures: Vec::new(),
    })
}

/// The category with the fewest accepted pairs; ties break in c1..c10 order.
fn least_covered_category(counters: &Counters) -> Category {
    Category::ALL
        .into_iter()
        .min_by_key(|c| counters.accepted_per_category.get(c).copied().unwrap_or(0))
        .expect("categories are non-empty")
}

/// Quota cap: a bucket holding `count` members may admit one more among
/// `n_accepted + 1` iff `count + 1 ≤ ceil(share_cap · (n_accepted + 1))`.
/// Shares that land on an integer within 1e-9 are treated as exact.
fn quota_admits(count: u64, n_accepted: u64, share_cap: f64) -> bool {
    let raw = share_cap * (n_accepted + 1) as f64;
    let cap = if (raw - raw.round()).abs() < 1e-9 {
        raw.round()
    } else {
        raw.ceil()
    } as u64;
    count < cap
}

struct ProcessedCandidate {
    candidate: InstructionCandidate,
    task_type: TaskType,
    response: String,
    verdict: JudgeVerdict,
}

enum CandidateResult {
    Ok(Box<ProcessedCandidate>),
    /// Candidate-local defect (e.g. empty text); counted as `errored`.
    Invalid(String),
}

async fn process_candidate(
    candidate: InstructionCandidate,
    config: &PipelineConfig,
    generator: &TeacherHandle,
    judge: &TeacherHandle,
) -> Result<CandidateResult, TeacherError> {
    if candidate.text.trim().is_empty() {
        return Ok(CandidateResult::Invalid(format!(
            "{}: empty candidate text",
            candidate.id
        )));
    }
    let task_type = classify_task(judge, &candidate).await?;
    let drafts =
        draft_responses(generator, judge, &candidate, task_type, config.draft_count).await?;
    let best = select_draft(&drafts)?.clone();
    let verdict = judge_scores(judge, &candidate.text, &best.text).await?;
    let mut candidate = candidate;
    candidate.task_type = Some(task_type);
    Ok(CandidateResult::Ok(Box::new(ProcessedCandidate {
        candidate,
        task_type,
        response: best.text,
        verdict,
    })))
}

/// Execute exactly one round. On teacher failure the state is untouched and
/// the error is returned; the caller records it.
pub async fn run_round(
    state: &mut PipelineState,
    config: &PipelineConfig,
    generator: &TeacherHandle,
    judge: &TeacherHandle,
) -> Result<RoundReport, PipelineError> {
    if state.accepted.len() >= config.target_pairs {
        return Err(PipelineError::Precondition(format!(
            "target already reached ({} of {})",
            state.accepted.len(),
            config.target_pairs
        )));
    }

    let round = state.round + 1;
    let target_category = least_covered_category(&state.counters);

    // Stage everything on copies; commit only on success.
    let mut rng = state.rng.clone();
    let seeds = sample_seeds(&state.pool, config.seeds_per_round, &mut rng)?;
    let request = GenerationRequest {
        seeds,
        target_category,
        batch_size: config.batch_size,
    };
    let candidates = generate_instructions(generator, &request, round).await?;

    let results = futures::future::join_all(
        candidates
            .into_iter()
            .map(|candidate| process_candidate(candidate, config, generator, judge)),
    )
    .await;
    let mut processed = Vec::with_capacity(results.len());
    for result in results {
        processed.push(result?);
    }

    // Commit phase: serialized, in candidate order.
    let mut report = RoundReport {
        round,
        target_category,
        candidates: processed.len() as u64,
        accepted: 0,
        rejected: 0,
        deferred: 0,
        errored: 0,
    };
    for result in processed {
        match result {
            CandidateResult::Invalid(detail) => {
                report.errored += 1;
                log::debug!("round {round}: candidate errored: {detail}");
            }
            CandidateResult::Ok(item) => {
                let filter_report = accept(
                    &item.candidate.text,
                    &item.response,
                    item.task_type,
                    item.candidate.category,
                    &item.verdict,
                    &state.index,
                    &config.length_policy,
                    &config.thresholds,
                );
                if !filter_report.accepted {
                    report.rejected += 1;
                    for reason in &filter_report.reasons {
                        *state.counters.rejected_by_reason.entry(*reason).or_insert(0) += 1;
                    }
                    continue;
                }

                let n_accepted = state.accepted.len() as u64;
                let complexity = item.verdict.complexity;
                let complexity_count = state
                    .counters
                    .accepted_per_complexity
                    .get(&complexity)
                    .copied()
                    .unwrap_or(0);
                let task_count = state
                    .counters
                    .accepted_per_task_type
                    .get(&item.task_type)
                    .copied()
                    .unwrap_or(0);
                let under_target = state.accepted.len() < config.target_pairs;
                let complexity_ok = quota_admits(
                    complexity_count,
                    n_accepted,
                    config.complexity_targets.fraction(complexity) + config.complexity_tolerance,
                );
                let task_type_ok = quota_admits(
                    task_count,
                    n_accepted,
                    1.0 / 3.0 + config.task_type_tolerance,
                );
                if !(under_target && complexity_ok && task_type_ok) {
                    report.deferred += 1;
                    log::debug!(
                        "round {round}: deferred {} (complexity {complexity}, task {})",
                        item.candidate.id,
                        item.task_type
                    );
                    continue;
                }

                let pair = InstructPair {
                    id: item.candidate.id.clone(),
                    instruction: item.candidate.text.clone(),
                    response: item.response.clone(),
                    task_type: item.task_type,
                    category: item.candidate.category,
                    complexity,
                    round,
                    filter_report,
                    verdict: item.verdict.clone(),
                };
                state.index.insert(
                    &pair.id,
                    pair.category,
                    &pair.instruction,
                    Some(&pair.response),
                )?;
                absorb(&mut state.pool, &pair)?;
                *state
                    .counters
                    .accepted_per_category
                    .entry(pair.category)
                    .or_insert(0) += 1;
                *state
                    .counters
                    .accepted_per_complexity
                    .entry(complexity)
                    .or_insert(0) += 1;
                *state
                    .counters
                    .accepted_per_task_type
                    .entry(item.task_type)
                    .or_insert(0) += 1;
                state.accepted.push(pair);
                report.accepted += 1;
            }
        }
    }

    state.counters.candidates += report.candidates;
    state.counters.accepted += report.accepted;
    state.counters.rejected += report.rejected;
    state.counters.deferred += report.deferred;
    state.counters.errored += report.errored;
    state.rng = rng;
    state.round = round;
    state.rounds.push(report.clone());
    Ok(report)
}

/// Terminal status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    /// The safety cap was hit before reaching the target; the partial
    /// dataset is still written.
    MaxRoundsExhausted,
}

/// Loop rounds until the target or the round cap is reached. Teacher
/// failures abort their round, are recorded on the state, and count against
/// the cap. `checkpoint_to` writes a checkpoint every `every` successful
/// rounds.
pub async fn run_to_target(
    state: &mut PipelineState,
    config: &PipelineConfig,
    generator: &TeacherHandle,
    judge: &TeacherHandle,
    checkpoint_to: Option<(&Path, u64)>,
) -> Result<RunStatus, PipelineError> {
    config.validate()?;
    let max_rounds = config.effective_max_rounds();
    while state.accepted.len() < config.target_pairs {
        if state.round + state.failed_rounds >= max_rounds {
            log::error!(
                "max_rounds_exhausted: {} of {} pairs after {} round attempts",
                state.accepted.len(),
                config.target_pairs,
                max_rounds
            );
            return Ok(RunStatus::MaxRoundsExhausted);
        }
        match run_round(state, config, generator, judge).await {
            Ok(report) => {
                log::info!(
                    "round {}: category {}: {} accepted, {} rejected, {} deferred, {} errored ({} total)",
                    report.round,
                    report.target_category,
                    report.accepted,
                    report.rejected,
                    report.deferred,
                    report.errored,
                    state.accepted.len()
                );
                if let Some((path, every)) = checkpoint_to {
                    if every > 0 && state.round.is_multiple_of(every) {
                        write_checkpoint(state, path)?;
                    }
                }
            }
            Err(PipelineError::Teacher(e)) => {
                state.failed_rounds += 1;
                state.failures.push(e.to_string());
                log::error!("round aborted by teacher failure: {e}");
            }
            Err(other) => return Err(other),
        }
    }
    Ok(RunStatus::Completed)
}

/// Summary written next to the dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub status: RunStatus,
    pub target_pairs: usize,
    pub accepted: usize,
    pub rounds: u64,
    pub failed_rounds: u64,
    pub candidates: u64,
    pub rejected: u64,
    pub deferred: u64,
    pub errored: u64,
    pub acceptance_rate: f64,
    pub per_category: BTreeMap<Category, u64>,
    pub per_complexity: BTreeMap<Complexity, f64>,
    pub per_task_type: BTreeMap<TaskType, f64>,
    pub rejected_by_reason: BTreeMap<ReasonCode, u64>,
    pub rng_seed: u64,
    pub config: PipelineConfig,
}

pub fn build_manifest(
    state: &PipelineState,
    config: &PipelineConfig,
    status: RunStatus,
) -> DatasetManifest {
    fn fractions<K: Ord + Copy>(counts: &BTreeMap<K, u64>, denominator: f64) -> BTreeMap<K, f64> {
        counts
            .iter()
            .map(|(k, v)| (*k, *v as f64 / denominator))
            .collect()
    }

    let accepted = state.accepted.len();
    let denominator = accepted.max(1) as f64;
    DatasetManifest {
        status,
        target_pairs: config.target_pairs,
        accepted,
        rounds: state.round,
        failed_rounds: state.failed_rounds,
        candidates: state.counters.candidates,
        rejected: state.counters.rejected,
        deferred: state.counters.deferred,
        errored: state.counters.errored,
        acceptance_rate: if state.counters.candidates == 0 {
            0.0
        } else {
            state.counters.accepted as f64 / state.counters.candidates as f64
        },
        per_category: state.counters.accepted_per_category.clone(),
        per_complexity: fractions(&state.counters.accepted_per_complexity, denominator),
        per_task_type: fractions(&state.counters.accepted_per_task_type, denominator),
        rejected_by_reason: state.counters.rejected_by_reason.clone(),
        rng_seed: config.rng_seed,
        config: config.clone(),
    }
}

/// The dataset JSONL bytes: one pair per line, in acceptance order.
pub fn dataset_bytes(state: &PipelineState) -> Vec<u8> {
    let mut bytes = Vec::new();
    for pair in &state.accepted {
        bytes.extend_from_slice(
            serde_json::to_string(pair)
                .expect("pair serializes")
                .as_bytes(),
        );
        bytes.push(b'\n');
    }
    bytes
}

pub fn write_dataset(state: &PipelineState, path: &Path) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&dataset_bytes(state))?;
    Ok(())
}

pub fn write_manifest(manifest: &DatasetManifest, path: &Path) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut file = std::fs::File::create(path)?;
    let json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    file.write_all(json.as_bytes())?;
    file.write_all(b"\n")?;
    Ok(())
}

/// Read a dataset JSONL file back into pairs.
pub fn read_dataset(path: &Path) -> Result<Vec<InstructPair>, PipelineError> {
    let content = std::fs::read_to_string(path)?;
    let mut pairs = Vec::new();
    for (index, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let pair: InstructPair = serde_json::from_str(line).map_err(|e| {
            PipelineError::Config(format!("dataset line {}: {e}", index + 1))
        })?;
        pairs.push(pair);
    }
    Ok(pairs)
}

/// One re-verification mismatch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub pair_id: String,
    pub detail: String,
}

/// Re-check every pair offline: rebuild the novelty index from the seeds and
/// the pairs in order, re-run the filter with each stored verdict, and
/// compare against the stored report. A clean dataset yields no
/// discrepancies.
pub fn reverify(
    seeds: &SeedPool,
    pairs: &[InstructPair],
    config: &PipelineConfig,
) -> Result<Vec<Discrepancy>, PipelineError> {
    let mut index = NoveltyIndex::new();
    for task in seeds.tasks() {
        // Bootstrapped seeds are re-inserted below in pair order.
        if task.origin == crate::types::Origin::Human {
            index.insert(&task.id, task.category, &task.text, None)?;
        }
    }
    let mut discrepancies = Vec::new();
    for pair in pairs {
        for violation in crate::types::validate_pair(pair) {
            discrepancies.push(Discrepancy {
                pair_id: pair.id.clone(),
                detail: format!("invariant violation: {violation}"),
            });
        }
        let recomputed = accept(
            &pair.instruction,
            &pair.response,
            pair.task_type,
            pair.category,
            &pair.verdict,
            &index,
            &config.length_policy,
            &config.thresholds,
        );
        if !recomputed.accepted {
            discrepancies.push(Discrepancy {
                pair_id: pair.id.clone(),
                detail: format!("re-check rejected: {:?}", recomputed.reasons),
            });
        } else if recomputed != pair.filter_report {
            discrepancies.push(Discrepancy {
                pair_id: pair.id.clone(),
                detail: "re-checked report differs from stored report".to_string(),
            });
        }
        index.insert(&pair.id, pair.category, &pair.instruction, Some(&pair.response))?;
    }
    Ok(discrepancies)
}
