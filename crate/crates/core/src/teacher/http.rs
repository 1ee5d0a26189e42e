//! HTTP chat-completion transport.
//!
//! POSTs the [`ChatRequest`](super::ChatRequest) JSON to the configured
//! endpoint and reads `{"choices": [{"message": {"content": ...}}]}` back.
//! The API key, when configured, comes from the environment variable named
//! in the config and is sent as a bearer authorization header.

use serde::Deserialize;

use super::{ChatRequest, ChatTransport, TeacherConfig, TeacherError, TransportError};

pub struct HttpTransport {
    client: reqwest::Client,
    endpoint: String,
    api_key: Option<String>,
}

#[derive(Debug, Deserialize)]
struct ChatReply {
    choices: Vec<Choice>,
}

#[derive(Debug, Deserialize)]
struct Choice {
    message: ChoiceMessage,
}

#[derive(Debug, Deserialize)]
struct ChoiceMessage {
    content: String,
}

impl HttpTransport {
    pub fn new(config: &TeacherConfig) -> Result<Self, TeacherError> {
        let api_key = if config.api_key_env.is_empty() {
            None
        } else {
            Some(std::env::var(&config.api_key_env).map_err(|_| {
                TeacherError::Config(format!(
                    "environment variable {} is not set",
                    config.api_key_env
                ))
            })?)
        };
        let client = reqwest::Client::builder()
            .timeout(std::time::Duration::from_secs_f64(config.timeout_secs))
            .build()
            .map_err(|e| TeacherError::Config(format!("http client: {e}")))?;
        Ok(HttpTransport {
            client,
            endpoint: config.endpoint.clone(),
            api_key,
        })
    }
}

#[async_trait::async_trait]
impl ChatTransport for HttpTransport {
    async fn complete(&self, request: &ChatRequest) -> Result<String, TransportError> {
        let mut builder = self.client.post(&self.endpoint).json(request);
        if let Some(key) = &self.api_key {
            builder = builder.bearer_auth(key);
        }
        let response = builder.send().await.map_err(|e| {
            TransportError::Unreachable(format!("{e}"))
        })?;

        let status = response.status();
        if status.as_u16() == 429 {
            return Err(TransportError::RateLimited);
        }
        if status.is_server_error() {
            return Err(TransportError::Unreachable(format!("HTTP {status}")));
        }
        if !status.is_success() {
            let detail = response.text().await.unwrap_or_default();
            return Err(TransportError::FatalStatus {
                status: status.as_u16(),
                detail: detail.chars().take(200).collect(),
            });
        }

        let reply: ChatReply = response
            .json()
            .await
            .map_err(|e| TransportError::Malformed(e.to_string()))?;
        reply
            .choices
            .into_iter()
            .next()
            .map(|choice| choice.message.content)
            .ok_or_else(|| TransportError::Malformed("reply has no choices".to_string()))
    }
}
