//! Teacher-model abstraction: a generator and a judge behind one interface.
//!
//! Both roles speak a minimal chat-completion protocol (see [`ChatRequest`])
//! against a pluggable [`ChatTransport`]: a real HTTP backend or the
//! deterministic [`mock`] used for tests and offline runs. The
//! [`TeacherHandle`] wraps a transport with an in-flight limit and
//! retry-with-backoff, so callers may issue requests from many tasks at once.

pub mod http;
pub mod mock;
pub mod prompts;

use std::sync::Arc;
use std::time::Duration;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tokio::sync::Semaphore;

use crate::types::{
    Category, InstructionCandidate, JudgeVerdict, ResponseDraft, SeedTask, TaskType,
};

/// Which backend a [`TeacherConfig`] selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Http,
    Mock,
}

/// Connection settings for one teacher role.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TeacherConfig {
    pub backend: BackendKind,
    pub endpoint: String,
    pub model_name: String,
    /// Name of the environment variable holding the API key; empty means no
    /// authorization header.
    #[serde(default)]
    pub api_key_env: String,
    pub max_in_flight: usize,
    pub timeout_secs: f64,
    pub max_retries: u32,
    /// Sampling temperature; defaults per role (0.7 generator, 0.0 judge).
    #[serde(default)]
    pub temperature: Option<f64>,
    /// First retry delay; doubles per attempt.
    #[serde(default = "default_retry_base_ms")]
    pub retry_base_ms: u64,
    /// Run seed for the mock backend.
    #[serde(default)]
    pub mock_seed: u64,
}

fn default_retry_base_ms() -> u64 {
    200
}

impl TeacherConfig {
    /// A mock-backed config suitable for tests and offline runs.
    pub fn mock(seed: u64) -> Self {
        TeacherConfig {
            backend: BackendKind::Mock,
            endpoint: "mock:".to_string(),
            model_name: "mock-teacher".to_string(),
            api_key_env: String::new(),
            max_in_flight: 4,
            timeout_secs: 30.0,
            max_retries: 1,
            temperature: None,
            retry_base_ms: 1,
            mock_seed: seed,
        }
    }

    pub fn validate(&self) -> Result<(), TeacherError> {
        if self.max_in_flight < 1 {
            return Err(TeacherError::Config("max_in_flight must be ≥ 1".into()));
        }
        if !self.timeout_secs.is_finite() || self.timeout_secs <= 0.0 {
            return Err(TeacherError::Config("timeout must be > 0".into()));
        }
        Ok(())
    }
}

/// The two teacher roles. Kept logically distinct even when pointed at the
/// same endpoint: generation and judging are separate duties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Generator,
    Judge,
}

impl Role {
    pub fn default_temperature(&self) -> f64 {
        match self {
            Role::Generator => 0.7,
            Role::Judge => 0.0,
        }
    }
}

/// A batch-generation request.
#[derive(Debug, Clone)]
pub struct GenerationRequest {
    pub seeds: Vec<SeedTask>,
    pub target_category: Category,
    pub batch_size: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Message {
    pub role: String,
    pub content: String,
}

impl Message {
    pub fn system(content: impl Into<String>) -> Self {
        Message {
            role: "system".to_string(),
            content: content.into(),
        }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Message {
            role: "user".to_string(),
            content: content.into(),
        }
    }
}

/// Wire request: `{"model", "messages": [...], "temperature"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<Message>,
    pub temperature: f64,
}

/// Transport-level failures, classified for retry.
#[derive(Debug, Error)]
pub enum TransportError {
    /// Could not reach the backend (connect failure, timeout, 5xx).
    #[error("unreachable: {0}")]
    Unreachable(String),
    /// HTTP 429.
    #[error("rate limited")]
    RateLimited,
    /// Non-retryable HTTP status (4xx other than 429).
    #[error("status {status}: {detail}")]
    FatalStatus { status: u16, detail: String },
    /// Reply body did not match the chat-completion envelope.
    #[error("malformed reply envelope: {0}")]
    Malformed(String),
}

impl TransportError {
    fn retryable(&self) -> bool {
        matches!(
            self,
            TransportError::Unreachable(_) | TransportError::RateLimited
        )
    }
}

/// Errors surfaced by teacher operations.
#[derive(Debug, Error)]
pub enum TeacherError {
    #[error("backend_unreachable after {attempts} attempt(s): {detail}")]
    BackendUnreachable { attempts: u32, detail: String },
    #[error("rate_limited after {attempts} attempt(s)")]
    RateLimited { attempts: u32 },
    #[error("bad_status {status}: {detail}")]
    BadStatus { status: u16, detail: String },
    #[error("malformed_reply ({context}): {detail}")]
    MalformedReply { context: &'static str, detail: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("config_error: {0}")]
    Config(String),
}

/// One chat completion against some backend.
#[async_trait]
pub trait ChatTransport: Send + Sync {
    async fn complete(&self, request: &ChatRequest) -> Result<String, TransportError>;
}

/// A role-bound backend handle: shareable, safe for concurrent calls, with
/// an internal semaphore enforcing `max_in_flight` and exponential-backoff
/// retries for retryable transport failures.
#[derive(Clone)]
pub struct TeacherHandle {
    transport: Arc<dyn ChatTransport>,
    semaphore: Arc<Semaphore>,
    model_name: String,
    temperature: f64,
    max_retries: u32,
    retry_base: Duration,
}

impl TeacherHandle {
    pub fn from_config(config: &TeacherConfig, role: Role) -> Result<Self, TeacherError> {
        config.validate()?;
        let transport: Arc<dyn ChatTransport> = match config.backend {
            BackendKind::Http => Arc::new(http::HttpTransport::new(config)?),
            BackendKind::Mock => Arc::new(mock::MockTransport::new(config.mock_seed)),
        };
        Ok(Self::with_transport(config, role, transport))
    }

    /// Build a handle over an explicit transport (tests use this to inject
    /// instrumented fakes).
    pub fn with_transport(
        config: &TeacherConfig,
        role: Role,
        transport: Arc<dyn ChatTransport>,
    ) -> Self {
        TeacherHandle {
            transport,
            semaphore: Arc::new(Semaphore::new(config.max_in_flight)),
            model_name: config.model_name.clone(),
            temperature: config.temperature.unwrap_or_else(|| role.default_temperature()),
            max_retries: config.max_retries,
            retry_base: Duration::from_millis(config.retry_base_ms),
        }
    }

    /// Issue one completion, retrying retryable failures with exponential
    /// backoff. Non-retryable statuses fail immediately.
    pub async fn complete(&self, messages: Vec<Message>) -> Result<String, TeacherError> {
        let _permit = self
            .semaphore
            .acquire()
            .await
            .expect("teacher semaphore closed");
        let request = ChatRequest {
            model: self.model_name.clone(),
            messages,
            temperature: self.temperature,
        };

        let attempts = self.max_retries + 1;
        let mut last_error: Option<TransportError> = None;
        for attempt in 0..attempts {
            if attempt > 0 {
                let delay = self.retry_base * 2u32.saturating_pow(attempt - 1);
                tokio::time::sleep(delay).await;
            }
            match self.transport.complete(&request).await {
                Ok(reply) => return Ok(reply),
                Err(TransportError::FatalStatus { status, detail }) => {
                    return Err(TeacherError::BadStatus { status, detail });
                }
                Err(TransportError::Malformed(detail)) => {
                    return Err(TeacherError::MalformedReply {
                        context: "chat reply envelope",
                        detail,
                    });
                }
                Err(retryable) => {
                    debug_assert!(retryable.retryable());
                    log::warn!("teacher request failed (attempt {}): {retryable}", attempt + 1);
                    last_error = Some(retryable);
                }
            }
        }
        match last_error {
            Some(TransportError::RateLimited) => Err(TeacherError::RateLimited { attempts }),
            Some(e) => Err(TeacherError::BackendUnreachable {
                attempts,
                detail: e.to_string(),
            }),
            None => unreachable!("retry loop ran at least once"),
        }
    }
}

/// Parse a numbered-list reply into instruction texts, keeping at most
/// `limit` items. Item texts may be empty; a reply with no numbered lines at
/// all is malformed.
fn parse_numbered_list(reply: &str, limit: usize) -> Result<Vec<String>, TeacherError> {
    let mut items = Vec::new();
    for line in reply.lines() {
        let line = line.trim();
        let digits = line.chars().take_while(|c| c.is_ascii_digit()).count();
        if digits == 0 {
            continue;
        }
        let rest = &line[digits..];
        let Some(rest) = rest.strip_prefix('.').or_else(|| rest.strip_prefix(')')) else {
            continue;
        };
        items.push(rest.trim().to_string());
        if items.len() == limit {
            break;
        }
    }
    if items.is_empty() {
        return Err(TeacherError::MalformedReply {
            context: "numbered instruction list",
            detail: format!("no numbered lines in reply: {reply:.80?}"),
        });
    }
    Ok(items)
}

/// Ask the generator for a batch of new instructions. The prompt embeds all
/// seed texts and the category name; every candidate is tagged with the
/// target category and `round`.
pub async fn generate_instructions(
    generator: &TeacherHandle,
    request: &GenerationRequest,
    round: u64,
) -> Result<Vec<InstructionCandidate>, TeacherError> {
    if request.seeds.is_empty() {
        return Err(TeacherError::Precondition("seeds must be non-empty".into()));
    }
    if request.batch_size < 1 {
        return Err(TeacherError::Precondition("batch_size must be ≥ 1".into()));
    }
    let messages = vec![
        Message::system(prompts::GENERATOR_SYSTEM),
        Message::user(prompts::generation_user(
            &request.seeds,
            request.target_category,
            request.batch_size,
            round,
        )),
    ];
    let reply = generator.complete(messages).await?;
    let texts = parse_numbered_list(&reply, request.batch_size)?;
    Ok(texts
        .into_iter()
        .enumerate()
        .map(|(index, text)| InstructionCandidate {
            id: format!("r{round}-{index}"),
            text,
            category: request.target_category,
            round,
            task_type: None,
        })
        .collect())
}

/// Classify an instruction into its answer style. The judge reply must be a
/// single label token; one re-ask is allowed before hard failure.
pub async fn classify_task(
    judge: &TeacherHandle,
    candidate: &InstructionCandidate,
) -> Result<TaskType, TeacherError> {
    if candidate.text.trim().is_empty() {
        return Err(TeacherError::Precondition(
            "instruction text must be non-empty".into(),
        ));
    }
    let base = vec![
        Message::system(prompts::CLASSIFY_SYSTEM),
        Message::user(prompts::classify_user(&candidate.text)),
    ];
    let reply = judge.complete(base.clone()).await?;
    if let Some(task_type) = TaskType::parse(reply.trim()) {
        return Ok(task_type);
    }
    log::warn!("classify reply not a label ({reply:.40?}); re-asking once");
    let mut retry = base;
    retry.push(Message::system(prompts::REPLY_FORMAT_REMINDER));
    let reply = judge.complete(retry).await?;
    TaskType::parse(reply.trim()).ok_or_else(|| TeacherError::MalformedReply {
        context: "task type label",
        detail: format!("reply was {reply:.40?}"),
    })
}

/// Raw verdict as the judge emits it; scores may be out of range.
#[derive(Debug, Deserialize)]
struct RawVerdict {
    grammar: f64,
    bias: f64,
    coherence: f64,
    factual: bool,
    format_ok: bool,
    regional_ok: bool,
    gender_ok: bool,
    political_ok: bool,
    task_type: TaskType,
    complexity: crate::types::Complexity,
}

fn clamp_score(value: f64, lo: f64, hi: f64, field: &str) -> f64 {
    if value < lo || value > hi || !value.is_finite() {
        let clamped = if value.is_finite() {
            value.clamp(lo, hi)
        } else {
            lo
        };
        log::warn!("judge {field} score {value} out of [{lo}, {hi}]; clamped to {clamped}");
        clamped
    } else {
        value
    }
}

fn parse_verdict(reply: &str) -> Result<JudgeVerdict, serde_json::Error> {
    let trimmed = reply.trim();
    let raw: RawVerdict = match serde_json::from_str(trimmed) {
        Ok(raw) => raw,
        Err(first_error) => {
            // Tolerate prose around the object: take first '{' to last '}'.
            match (trimmed.find('{'), trimmed.rfind('}')) {
                (Some(start), Some(end)) if start < end => {
                    serde_json::from_str(&trimmed[start..=end])?
                }
                _ => return Err(first_error),
            }
        }
    };
    Ok(JudgeVerdict {
        grammar: clamp_score(raw.grammar, 0.0, 1.0, "grammar"),
        bias: clamp_score(raw.bias, -1.0, 1.0, "bias"),
        coherence: clamp_score(raw.coherence, 0.0, 1.0, "coherence"),
        factual: raw.factual,
        format_ok: raw.format_ok,
        regional_ok: raw.regional_ok,
        gender_ok: raw.gender_ok,
        political_ok: raw.political_ok,
        task_type: raw.task_type,
        complexity: raw.complexity,
    })
}

/// Score an instruction-response pair. The judge must reply with one JSON
/// object matching the verdict schema; out-of-range scores are clamped and
/// logged, and one re-ask is allowed on a malformed reply.
pub async fn judge_scores(
    judge: &TeacherHandle,
    instruction: &str,
    response: &str,
) -> Result<JudgeVerdict, TeacherError> {
    if instruction.trim().is_empty() || response.trim().is_empty() {
        return Err(TeacherError::Precondition(
            "instruction and response must be non-empty".into(),
        ));
    }
    let base = vec![
        Message::system(prompts::JUDGE_SYSTEM),
        Message::user(prompts::judge_user(instruction, response)),
    ];
    let reply = judge.complete(base.clone()).await?;
    match parse_verdict(&reply) {
        Ok(verdict) => Ok(verdict),
        Err(first_error) => {
            log::warn!("judge reply not a verdict object ({first_error}); re-asking once");
            let mut retry = base;
            retry.push(Message::system(prompts::REPLY_FORMAT_REMINDER));
            let reply = judge.complete(retry).await?;
            parse_verdict(&reply).map_err(|e| TeacherError::MalformedReply {
                context: "judge verdict object",
                detail: e.to_string(),
            })
        }
    }
}

/// Produce `draft_count` responses for an instruction, each scored for
/// coherence by the judge. Drafts keep backend order.
pub async fn draft_responses(
    generator: &TeacherHandle,
    judge: &TeacherHandle,
    candidate: &InstructionCandidate,
    task_type: TaskType,
    draft_count: usize,
) -> Result<Vec<ResponseDraft>, TeacherError> {
    if draft_count < 1 {
        return Err(TeacherError::Precondition("draft_count must be ≥ 1".into()));
    }
    let mut drafts = Vec::with_capacity(draft_count);
    for variant in 1..=draft_count {
        let messages = vec![
            Message::system(prompts::DRAFT_SYSTEM),
            Message::user(prompts::draft_user(
                &candidate.text,
                candidate.category,
                task_type,
                variant,
                draft_count,
            )),
        ];
        let text = generator.complete(messages).await?;
        if text.trim().is_empty() {
            return Err(TeacherError::MalformedReply {
                context: "response draft",
                detail: "backend returned empty text".into(),
            });
        }
        let verdict = judge_scores(judge, &candidate.text, &text).await?;
        drafts.push(ResponseDraft {
            text,
            coherence: verdict.coherence,
        });
    }
    Ok(drafts)
}

/// Pick the draft with maximum coherence; ties break to the earliest.
pub fn select_draft(drafts: &[ResponseDraft]) -> Result<&ResponseDraft, TeacherError> {
    drafts
        .iter()
        .reduce(|best, draft| if draft.coherence > best.coherence { draft } else { best })
        .ok_or_else(|| TeacherError::Precondition("empty_drafts: drafts must be non-empty".into()))
}
