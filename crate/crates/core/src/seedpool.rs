//! Seed-pool loading, validation, sampling, and growth.
//!
//! The pool starts from a human-curated JSONL file (schema per line:
//! `{"id", "text", "category", "complexity", "origin"}`) and grows by
//! absorbing accepted generated pairs. It is an append-only, single-writer
//! value: prior tasks are never mutated.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{Category, Complexity, InstructPair, Origin, SeedTask};

#[derive(Debug, Error)]
pub enum SeedPoolError {
    #[error("io_error: {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse_error: {path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("duplicate_id: {path}:{line}: id {id:?} already seen")]
    DuplicateId {
        path: String,
        line: usize,
        id: String,
    },
    #[error("invalid_seed: {path}:{line}: {message}")]
    InvalidSeed {
        path: String,
        line: usize,
        message: String,
    },
    #[error("empty_pool: operation requires a non-empty pool")]
    EmptyPool,
    #[error("insufficient_pool: requested {requested} from pool of {available}")]
    InsufficientPool { requested: usize, available: usize },
    #[error("rejected_pair: pair {id:?} was not accepted by the filter")]
    RejectedPair { id: String },
}

/// The bootstrap pool. Counts are maintained incrementally and always equal
/// a full recount over `tasks`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SeedPool {
    tasks: Vec<SeedTask>,
    category_counts: BTreeMap<Category, usize>,
    complexity_counts: BTreeMap<Complexity, usize>,
    #[serde(skip)]
    ids: HashSet<String>,
}

/// Category/complexity balance report for a pool.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistributionReport {
    pub total: usize,
    pub per_category: BTreeMap<Category, usize>,
    pub per_complexity: BTreeMap<Complexity, f64>,
    pub violations: Vec<String>,
}

/// Complexity-mix targets as fractions that must sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexityTargets {
    pub basic: f64,
    pub intermediate: f64,
    pub advanced: f64,
}

impl Default for ComplexityTargets {
    fn default() -> Self {
        ComplexityTargets {
            basic: 0.40,
            intermediate: 0.40,
            advanced: 0.20,
        }
    }
}

impl ComplexityTargets {
    pub fn fraction(&self, level: Complexity) -> f64 {
        match level {
            Complexity::Basic => self.basic,
            Complexity::Intermediate => self.intermediate,
            Complexity::Advanced => self.advanced,
        }
    }

    pub fn sums_to_one(&self) -> bool {
        (self.basic + self.intermediate + self.advanced - 1.0).abs() <= 1e-9
    }
}

impl fmt::Display for DistributionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} tasks, {} violation(s)",
            self.total,
            self.violations.len()
        )
    }
}

/// Category share window: each category must hold 9%–11% of the pool.
/// For a 500-task pool that is the 45–55 band.
const CATEGORY_SHARE_LO: f64 = 0.09;
const CATEGORY_SHARE_HI: f64 = 0.11;
/// Allowed deviation per complexity bucket from its target fraction.
pub const COMPLEXITY_TOLERANCE: f64 = 0.05;

impl SeedPool {
    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn tasks(&self) -> &[SeedTask] {
        &self.tasks
    }

    pub fn category_counts(&self) -> &BTreeMap<Category, usize> {
        &self.category_counts
    }

    pub fn complexity_counts(&self) -> &BTreeMap<Complexity, usize> {
        &self.complexity_counts
    }

    fn push(&mut self, task: SeedTask) {
        *self.category_counts.entry(task.category).or_insert(0) += 1;
        *self.complexity_counts.entry(task.complexity).or_insert(0) += 1;
        self.ids.insert(task.id.clone());
        self.tasks.push(task);
    }

    /// Restore the skipped id set after deserialization.
    pub fn rebuild(&mut self) {
        self.ids = self.tasks.iter().map(|t| t.id.clone()).collect();
    }

    /// Recount categories and complexities from scratch (test oracle).
    pub fn recount(&self) -> (BTreeMap<Category, usize>, BTreeMap<Complexity, usize>) {
        let mut categories = BTreeMap::new();
        let mut complexities = BTreeMap::new();
        for task in &self.tasks {
            *categories.entry(task.category).or_insert(0) += 1;
            *complexities.entry(task.complexity).or_insert(0) += 1;
        }
        (categories, complexities)
    }
}

/// Load a seed pool from a JSONL file, rejecting the whole file on the first
/// malformed record, duplicate id, or invariant violation.
pub fn load_seeds(path: &Path) -> Result<SeedPool, SeedPoolError> {
    let display = path.display().to_string();
    let file = File::open(path).map_err(|source| SeedPoolError::Io {
        path: display.clone(),
        source,
    })?;
    let reader = BufReader::new(file);

    let mut pool = SeedPool::default();
    for (index, line) in reader.lines().enumerate() {
        let line_no = index + 1;
        let line = line.map_err(|source| SeedPoolError::Io {
            path: display.clone(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let task: SeedTask =
            serde_json::from_str(&line).map_err(|e| SeedPoolError::Parse {
                path: display.clone(),
                line: line_no,
                message: e.to_string(),
            })?;
        if task.text.trim().is_empty() {
            return Err(SeedPoolError::InvalidSeed {
                path: display.clone(),
                line: line_no,
                message: "seed text is empty".to_string(),
            });
        }
        if pool.ids.contains(&task.id) {
            return Err(SeedPoolError::DuplicateId {
                path: display.clone(),
                line: line_no,
                id: task.id,
            });
        }
        pool.push(task);
    }
    Ok(pool)
}

/// Check category balance (9%–11% share per category) and the complexity
/// mix against `targets` ± [`COMPLEXITY_TOLERANCE`].
pub fn validate_distribution(
    pool: &SeedPool,
    targets: &ComplexityTargets,
) -> Result<DistributionReport, SeedPoolError> {
    if pool.is_empty() {
        return Err(SeedPoolError::EmptyPool);
    }
    let total = pool.len() as f64;
    let mut violations = Vec::new();

    let lo = CATEGORY_SHARE_LO * total - 1e-9;
    let hi = CATEGORY_SHARE_HI * total + 1e-9;
    for category in Category::ALL {
        let count = *pool.category_counts.get(&category).unwrap_or(&0) as f64;
        if count < lo || count > hi {
            violations.push(format!("category_imbalance:{category}"));
        }
    }

    let mut per_complexity = BTreeMap::new();
    let mut mix_ok = true;
    for level in Complexity::ALL {
        let fraction = *pool.complexity_counts.get(&level).unwrap_or(&0) as f64 / total;
        per_complexity.insert(level, fraction);
        if (fraction - targets.fraction(level)).abs() > COMPLEXITY_TOLERANCE + 1e-9 {
            mix_ok = false;
        }
    }
    if !mix_ok {
        violations.push("complexity_mix".to_string());
    }

    Ok(DistributionReport {
        total: pool.len(),
        per_category: pool.category_counts.clone(),
        per_complexity,
        violations,
    })
}

/// Draw `k` distinct tasks uniformly without replacement.
///
/// A partial Fisher–Yates over indices keeps the draw fully determined by
/// the RNG state, so identical seeds give identical samples.
pub fn sample_seeds<R: Rng>(
    pool: &SeedPool,
    k: usize,
    rng: &mut R,
) -> Result<Vec<SeedTask>, SeedPoolError> {
    if k == 0 || pool.len() < k {
        return Err(SeedPoolError::InsufficientPool {
            requested: k,
            available: pool.len(),
        });
    }
    let mut indices: Vec<usize> = (0..pool.len()).collect();
    let mut sample = Vec::with_capacity(k);
    for position in 0..k {
        let pick = rng.gen_range(position..indices.len());
        indices.swap(position, pick);
        sample.push(pool.tasks[indices[position]].clone());
    }
    Ok(sample)
}

/// Append an accepted pair to the pool as a bootstrapped seed.
pub fn absorb(pool: &mut SeedPool, pair: &InstructPair) -> Result<(), SeedPoolError> {
    if !pair.filter_report.accepted {
        return Err(SeedPoolError::RejectedPair {
            id: pair.id.clone(),
        });
    }
    pool.push(SeedTask {
        id: pair.id.clone(),
        text: pair.instruction.clone(),
        category: pair.category,
        complexity: pair.complexity,
        origin: Origin::Bootstrapped,
    });
    Ok(())
}
