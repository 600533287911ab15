//! Provider-agnostic LLM invocation: an HTTP chat-completion client with
//! retries, a deterministic mock for offline runs, and answer parsing.

mod http;
mod mock;
mod parse;

pub use http::HttpProvider;
pub use mock::{MockProvider, MockScript};
pub use parse::{parse_classification, parse_regression, AnswerKind, ParsedAnswer};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("invalid provider config: {0}")]
    InvalidConfig(String),
    #[error("API key environment variable {0} is not set")]
    MissingApiKey(String),
    #[error("provider rejected the request (status {status}): {excerpt}")]
    Provider { status: u16, excerpt: String },
    #[error("transient failures exhausted after {attempts} attempt(s): {message}")]
    Exhausted { attempts: u32, message: String },
    #[error("mock has no response for request {0:?}")]
    MockMiss(String),
}

impl GatewayError {
    /// Fatal errors mean the whole run is misconfigured and should stop
    /// before any request is sent.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            GatewayError::InvalidConfig(_) | GatewayError::MissingApiKey(_)
        )
    }
}

/// Connection settings for one chat-completion endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProviderConfig {
    pub name: String,
    pub base_url: String,
    pub model_id: String,
    /// Name of the environment variable holding the API key; the key itself
    /// never appears in config files or logs.
    pub api_key_env_var: Option<String>,
    pub temperature: f64,
    pub max_output_tokens: u32,
    pub request_timeout_s: u64,
    pub max_retries: u32,
    pub parallelism_limit: usize,
    /// First backoff delay; doubles per retry with jitter.
    pub retry_base_ms: u64,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        Self {
            name: "default".into(),
            base_url: String::new(),
            model_id: String::new(),
            api_key_env_var: None,
            temperature: 0.0,
            max_output_tokens: 1024,
            request_timeout_s: 60,
            max_retries: 3,
            parallelism_limit: 1,
            retry_base_ms: 1000,
        }
    }
}

impl ProviderConfig {
    pub fn validate(&self) -> Result<(), GatewayError> {
        if self.temperature < 0.0 {
            return Err(GatewayError::InvalidConfig(format!(
                "temperature must be >= 0, got {}",
                self.temperature
            )));
        }
        if self.parallelism_limit < 1 {
            return Err(GatewayError::InvalidConfig(
                "parallelism_limit must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// One completion request; `tag` identifies the sample for logging and for
/// mock lookup, and is ignored by real providers.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletionRequest {
    pub prompt: String,
    pub tag: String,
}

/// Generated text plus request accounting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Completion {
    pub text: String,
    pub provider_latency_ms: u64,
    pub attempt_count: u32,
}

/// Anything that can answer a prompt: the HTTP provider or a mock.
pub trait CompletionProvider: Send + Sync {
    fn complete(&self, request: &CompletionRequest) -> Result<Completion, GatewayError>;
    /// Maximum in-flight requests the provider tolerates.
    fn parallelism(&self) -> usize {
        1
    }
}
