//! Corpus and dataset statistics.
//!
//! Corpus counting conventions, fixed for reproducibility: a token is a
//! whitespace-separated unit; a sentence ends at a Bengali danda (। U+0964),
//! "?", "!", or "." that is followed by whitespace or end of input, and a
//! segment only counts when it contains something other than whitespace.
//! A trailing unterminated segment counts too. Terminators inside a token
//! ("a.b.c", decimals, ellipses) do not split, which also guarantees
//! tokens ≥ sentences. Both counts are computed per file and summed, so
//! stats over disjoint file sets add.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filters::metrics::{DANDA, DOUBLE_DANDA};
use crate::seedpool::ComplexityTargets;
use crate::types::{Category, Complexity, InstructPair, TaskType};

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("io_error: {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("encoding_error: {path}: invalid UTF-8 at byte offset {offset}")]
    Encoding { path: String, offset: usize },
}

/// Token/sentence totals over a set of text files.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub files: u64,
    pub tokens: u64,
    pub sentences: u64,
    pub tokens_per_sentence: f64,
}

impl CorpusStats {
    fn with_mean(files: u64, tokens: u64, sentences: u64) -> Self {
        CorpusStats {
            files,
            tokens,
            sentences,
            tokens_per_sentence: if sentences == 0 {
                0.0
            } else {
                tokens as f64 / sentences as f64
            },
        }
    }

    /// Merge two disjoint counts (associative, identity = default).
    pub fn merge(self, other: CorpusStats) -> CorpusStats {
        CorpusStats::with_mean(
            self.files + other.files,
            self.tokens + other.tokens,
            self.sentences + other.sentences,
        )
    }
}

fn is_sentence_terminator(c: char) -> bool {
    c == DANDA || c == DOUBLE_DANDA || c == '?' || c == '!' || c == '.'
}

/// Count tokens and sentences in one text.
pub fn text_stats(text: &str) -> (u64, u64) {
    let tokens = text.split_whitespace().count() as u64;
    let mut sentences = 0u64;
    let mut segment_has_content = false;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        let at_token_end = chars.peek().is_none_or(|next| next.is_whitespace());
        if is_sentence_terminator(c) && at_token_end {
            if segment_has_content {
                sentences += 1;
            }
            segment_has_content = false;
        } else if !c.is_whitespace() {
            segment_has_content = true;
        }
    }
    if segment_has_content {
        sentences += 1;
    }
    (tokens, sentences)
}

/// Tokens and sentences across UTF-8 text files.
pub fn corpus_stats(paths: &[PathBuf]) -> Result<CorpusStats, AnalyticsError> {
    let mut total = CorpusStats::default();
    for path in paths {
        let bytes = std::fs::read(path).map_err(|source| AnalyticsError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let text = std::str::from_utf8(&bytes).map_err(|e| AnalyticsError::Encoding {
            path: path.display().to_string(),
            offset: e.valid_up_to(),
        })?;
        let (tokens, sentences) = text_stats(text);
        total = total.merge(CorpusStats::with_mean(1, tokens, sentences));
    }
    Ok(total)
}

/// Distribution report over a generated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetReport {
    pub pairs: usize,
    pub per_category: BTreeMap<Category, u64>,
    pub per_complexity: BTreeMap<Complexity, f64>,
    pub per_task_type: BTreeMap<TaskType, f64>,
    /// Echo of the manifest's acceptance rate when one is supplied.
    pub acceptance_rate: Option<f64>,
    pub flags: Vec<String>,
}

/// Tolerances the dataset report checks buckets against.
#[derive(Debug, Clone, Copy)]
pub struct ReportTolerances {
    pub complexity_targets: ComplexityTargets,
    pub complexity_tolerance: f64,
    pub task_type_tolerance: f64,
}

impl Default for ReportTolerances {
    fn default() -> Self {
        ReportTolerances {
            complexity_targets: ComplexityTargets::default(),
            complexity_tolerance: 0.05,
            task_type_tolerance: 0.15,
        }
    }
}

/// Summarize category/complexity/task-type distributions, flagging any
/// complexity bucket outside tolerance and any absent category. Empty input
/// yields an empty report with no flags.
pub fn dataset_report(
    pairs: &[InstructPair],
    tolerances: &ReportTolerances,
    acceptance_rate: Option<f64>,
) -> DatasetReport {
    let mut per_category: BTreeMap<Category, u64> = BTreeMap::new();
    let mut complexity_counts: BTreeMap<Complexity, u64> = BTreeMap::new();
    let mut task_type_counts: BTreeMap<TaskType, u64> = BTreeMap::new();
    for pair in pairs {
        *per_category.entry(pair.category).or_insert(0) += 1;
        *complexity_counts.entry(pair.complexity).or_insert(0) += 1;
        *task_type_counts.entry(pair.task_type).or_insert(0) += 1;
    }

    let total = pairs.len() as f64;
    let mut per_complexity = BTreeMap::new();
    let mut per_task_type = BTreeMap::new();
    let mut flags = Vec::new();

    if !pairs.is_empty() {
        for level in Complexity::ALL {
            let fraction = *complexity_counts.get(&level).unwrap_or(&0) as f64 / total;
            per_complexity.insert(level, fraction);
            let target = tolerances.complexity_targets.fraction(level);
            if (fraction - target).abs() > tolerances.complexity_tolerance + 1e-9 {
                flags.push(format!("complexity_out_of_tolerance:{level}"));
            }
        }
        for task_type in TaskType::ALL {
            let fraction = *task_type_counts.get(&task_type).unwrap_or(&0) as f64 / total;
            per_task_type.insert(task_type, fraction);
            if (fraction - 1.0 / 3.0).abs() > tolerances.task_type_tolerance + 1e-9 {
                flags.push(format!("task_type_out_of_tolerance:{task_type}"));
            }
        }
        for category in Category::ALL {
            if !per_category.contains_key(&category) {
                flags.push(format!("category_missing:{category}"));
            }
        }
    }

    DatasetReport {
        pairs: pairs.len(),
        per_category,
        per_complexity,
        per_task_type,
        acceptance_rate,
        flags,
    }
}

/// Collect the text files for `stats corpus`: a file argument is taken as
/// is; a directory contributes its regular files in sorted order.
pub fn collect_corpus_paths(root: &Path) -> Result<Vec<PathBuf>, AnalyticsError> {
    let io_err = |source| AnalyticsError::Io {
        path: root.display().to_string(),
        source,
    };
    let metadata = std::fs::metadata(root).map_err(io_err)?;
    if metadata.is_file() {
        return Ok(vec![root.to_path_buf()]);
    }
    let mut paths: Vec<PathBuf> = std::fs::read_dir(root)
        .map_err(io_err)?
        .filter_map(|entry| entry.ok())
        .map(|entry| entry.path())
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    Ok(paths)
}
