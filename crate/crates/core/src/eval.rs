//! Pass@1 benchmark harness.
//!
//! Each benchmark item is asked once (single sample), the reply is graded by
//! the item's named grader after normalization, and the aggregate score is
//! the fraction of correct items. Normalization, fixed so scores reproduce:
//! NFC, trim, collapse internal whitespace, then strip trailing danda and
//! ASCII periods.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use async_trait::async_trait;
use futures::StreamExt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filters::metrics::{normalize_text, DANDA, DOUBLE_DANDA};
use crate::teacher::{Message, TeacherError, TeacherHandle};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("empty_results: no results to aggregate")]
    EmptyResults,
    #[error("empty_items: benchmark file has no items")]
    EmptyItems,
    #[error("all_requests_failed: every item errored; first error: {first}")]
    AllRequestsFailed { first: String },
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
    #[error("invalid_item {id}: {message}")]
    InvalidItem { id: String, message: String },
}

/// How an item's reply is graded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Grader {
    ExactMatch,
    Contains,
    /// Named plugin grader; resolved from the registry at evaluation time.
    Plugin(String),
}

impl Serialize for Grader {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Grader {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        match raw.as_str() {
            "exact_match" => Ok(Grader::ExactMatch),
            "contains" => Ok(Grader::Contains),
            other => match other.strip_prefix("plugin:") {
                Some(name) if !name.is_empty() => Ok(Grader::Plugin(name.to_string())),
                _ => Err(serde::de::Error::custom(format!(
                    "unknown grader {raw:?}; expected exact_match, contains, or plugin:<name>"
                ))),
            },
        }
    }
}

impl fmt::Display for Grader {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grader::ExactMatch => f.write_str("exact_match"),
            Grader::Contains => f.write_str("contains"),
            Grader::Plugin(name) => write!(f, "plugin:{name}"),
        }
    }
}

/// One benchmark task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkItem {
    pub id: String,
    pub prompt: String,
    #[serde(default)]
    pub expected: String,
    pub grader: Grader,
}

/// Outcome for one item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub item_id: String,
    pub model_output: String,
    pub correct: bool,
    /// Wall-clock seconds for the model call.
    pub latency: f64,
}

/// Aggregate summary: `{benchmark, n, pass_at_1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub benchmark: String,
    pub n: usize,
    pub pass_at_1: f64,
}

/// Anything that can answer a prompt once.
#[async_trait]
pub trait ModelClient: Send + Sync {
    async fn complete(&self, prompt: &str) -> Result<String, TeacherError>;
}

#[async_trait]
impl ModelClient for TeacherHandle {
    async fn complete(&self, prompt: &str) -> Result<String, TeacherError> {
        TeacherHandle::complete(self, vec![Message::user(prompt)]).await
    }
}

/// Custom grading logic for `plugin:` graders. Code-execution grading plugs
/// in here; nothing of the sort ships built in.
pub trait PluginGrader: Send + Sync {
    fn grade(&self, output: &str, expected: &str) -> bool;
}

#[derive(Default, Clone)]
pub struct GraderRegistry {
    plugins: HashMap<String, Arc<dyn PluginGrader>>,
}

impl GraderRegistry {
    pub fn new() -> Self {
        GraderRegistry::default()
    }

    pub fn register(&mut self, name: impl Into<String>, grader: Arc<dyn PluginGrader>) {
        self.plugins.insert(name.into(), grader);
    }

    pub fn get(&self, name: &str) -> Option<&Arc<dyn PluginGrader>> {
        self.plugins.get(name)
    }
}

/// Normalize an answer for comparison: NFC, whitespace collapse, and
/// trailing danda/period removal.
pub fn normalize_answer(text: &str) -> String {
    let collapsed = normalize_text(text);
    collapsed
        .trim_end_matches([DANDA, DOUBLE_DANDA, '.', ' '])
        .to_string()
}

/// Grade one output against one item. Deterministic; an unresolvable plugin
/// grades incorrect (and is logged by the caller).
pub fn grade(item: &BenchmarkItem, output: &str, registry: &GraderRegistry) -> bool {
    let output_norm = normalize_answer(output);
    let expected_norm = normalize_answer(&item.expected);
    match &item.grader {
        Grader::ExactMatch => output_norm == expected_norm,
        Grader::Contains => output_norm.contains(&expected_norm),
        Grader::Plugin(name) => match registry.get(name) {
            Some(plugin) => plugin.grade(&output_norm, &expected_norm),
            None => {
                log::warn!("no plugin grader named {name:?}; grading item {} incorrect", item.id);
                false
            }
        },
    }
}

/// Fraction of results with `correct = true`.
pub fn pass_at_1(results: &[EvalResult]) -> Result<f64, EvalError> {
    if results.is_empty() {
        return Err(EvalError::EmptyResults);
    }
    let correct = results.iter().filter(|r| r.correct).count();
    Ok(correct as f64 / results.len() as f64)
}

/// Validate items before evaluation: exact_match and contains need a
/// non-empty expected answer.
pub fn validate_items(items: &[BenchmarkItem]) -> Result<(), EvalError> {
    if items.is_empty() {
        return Err(EvalError::EmptyItems);
    }
    for item in items {
        let needs_expected = matches!(item.grader, Grader::ExactMatch | Grader::Contains);
        if needs_expected && item.expected.trim().is_empty() {
            return Err(EvalError::InvalidItem {
                id: item.id.clone(),
                message: format!("{} grader requires a non-empty expected answer", item.grader),
            });
        }
    }
    Ok(())
}

/// Query the client once per item (Pass@1), grading every reply. Item-level
/// failures are graded incorrect and logged, never dropped; only a run where
/// every single item errored is an error.
pub async fn evaluate<C: ModelClient>(
    client: &C,
    items: &[BenchmarkItem],
    concurrency: usize,
    registry: &GraderRegistry,
) -> Result<(Vec<EvalResult>, f64), EvalError> {
    validate_items(items)?;
    let concurrency = concurrency.max(1);

    let mut results = Vec::with_capacity(items.len());
    let mut first_error: Option<String> = None;
    let mut errored = 0usize;

    let mut stream = futures::stream::iter(items.iter().map(|item| async move {
        let started = Instant::now();
        let reply = client.complete(&item.prompt).await;
        (item, reply, started.elapsed().as_secs_f64())
    }))
    .buffered(concurrency);

    while let Some((item, reply, latency)) = stream.next().await {
        match reply {
            Ok(output) => {
                let correct = grade(item, &output, registry);
                results.push(EvalResult {
                    item_id: item.id.clone(),
                    model_output: output,
                    correct,
                    latency,
                });
            }
            Err(e) => {
                log::warn!("item {} failed: {e}; graded incorrect", item.id);
                errored += 1;
                if first_error.is_none() {
                    first_error = Some(e.to_string());
                }
                results.push(EvalResult {
                    item_id: item.id.clone(),
                    model_output: String::new(),
                    correct: false,
                    latency,
                });
            }
        }
    }

    if errored == items.len() {
        return Err(EvalError::AllRequestsFailed {
            first: first_error.unwrap_or_default(),
        });
    }
    let score = pass_at_1(&results)?;
    Ok((results, score))
}

/// Load benchmark items from JSONL.
pub fn load_items(path: &Path) -> Result<Vec<BenchmarkItem>, EvalError> {
    let display = path.display().to_string();
    let content = std::fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: display.clone(),
        source,
    })?;
    let mut items = Vec::new();
    for (index, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let item: BenchmarkItem = serde_json::from_str(line).map_err(|e| EvalError::Parse {
            path: display.clone(),
            line: index + 1,
            message: e.to_string(),
        })?;
        items.push(item);
    }
    Ok(items)
}
