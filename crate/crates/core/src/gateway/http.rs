//! Chat-completion HTTP client with exponential backoff on transient
//! failures.

use std::time::{Duration, Instant};

use rand::Rng;
use serde::Deserialize;

use super::{Completion, CompletionProvider, CompletionRequest, GatewayError, ProviderConfig};

/// Sends `{model, messages, temperature, max_tokens}` to a chat-completion
/// endpoint and returns the first choice's message content.
///
/// Timeouts, HTTP 429 and 5xx are retried with exponential backoff (base
/// `retry_base_ms`, doubling, plus jitter) up to `max_retries` extra
/// attempts. Other 4xx responses fail immediately with a body excerpt.
pub struct HttpProvider {
    cfg: ProviderConfig,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
}

impl HttpProvider {
    /// Validates the config and resolves the API key from the environment,
    /// so a missing key fails before any network call.
    pub fn new(cfg: ProviderConfig) -> Result<Self, GatewayError> {
        cfg.validate()?;
        if cfg.base_url.is_empty() {
            return Err(GatewayError::InvalidConfig(format!(
                "provider {:?} has no base_url",
                cfg.name
            )));
        }
        let api_key = match &cfg.api_key_env_var {
            Some(var) if !var.is_empty() => Some(
                std::env::var(var).map_err(|_| GatewayError::MissingApiKey(var.clone()))?,
            ),
            _ => None,
        };
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(cfg.request_timeout_s))
            .build()
            .map_err(|e| GatewayError::InvalidConfig(e.to_string()))?;
        Ok(Self {
            cfg,
            api_key,
            client,
        })
    }

    fn send_once(&self, prompt: &str) -> Result<String, AttemptError> {
        #[derive(Deserialize)]
        struct Message {
            content: String,
        }
        #[derive(Deserialize)]
        struct Choice {
            message: Message,
        }
        #[derive(Deserialize)]
        struct Response {
            choices: Vec<Choice>,
        }

        let body = serde_json::json!({
            "model": self.cfg.model_id,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.cfg.temperature,
            "max_tokens": self.cfg.max_output_tokens,
        });
        let mut request = self.client.post(&self.cfg.base_url).json(&body);
        if let Some(key) = &self.api_key {
            request = request.bearer_auth(key);
        }
        let response = request
            .send()
            .map_err(|e| AttemptError::Transient(e.to_string()))?;
        let status = response.status();
        if status.as_u16() == 429 || status.is_server_error() {
            return Err(AttemptError::Transient(format!("status {status}")));
        }
        if !status.is_success() {
            let excerpt: String = response
                .text()
                .unwrap_or_default()
                .chars()
                .take(200)
                .collect();
            return Err(AttemptError::Fatal(GatewayError::Provider {
                status: status.as_u16(),
                excerpt,
            }));
        }
        let parsed: Response = response
            .json()
            .map_err(|e| AttemptError::Transient(format!("malformed response: {e}")))?;
        parsed
            .choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| AttemptError::Transient("response had no choices".into()))
    }
}

enum AttemptError {
    Transient(String),
    Fatal(GatewayError),
}

impl CompletionProvider for HttpProvider {
    fn complete(&self, request: &CompletionRequest) -> Result<Completion, GatewayError> {
        if request.prompt.is_empty() {
            return Err(GatewayError::InvalidConfig("empty prompt".into()));
        }
        let start = Instant::now();
        let max_attempts = self.cfg.max_retries + 1;
        let mut last_message = String::new();
        for attempt in 1..=max_attempts {
            match self.send_once(&request.prompt) {
                Ok(text) => {
                    return Ok(Completion {
                        text,
                        provider_latency_ms: start.elapsed().as_millis() as u64,
                        attempt_count: attempt,
                    })
                }
                Err(AttemptError::Fatal(err)) => return Err(err),
                Err(AttemptError::Transient(message)) => {
                    last_message = message;
                    if attempt < max_attempts {
                        let base = self.cfg.retry_base_ms.saturating_mul(1u64 << (attempt - 1));
                        let jitter = rand::thread_rng().gen_range(0..=base / 2 + 1);
                        std::thread::sleep(Duration::from_millis(base + jitter));
                    }
                }
            }
        }
        Err(GatewayError::Exhausted {
            attempts: max_attempts,
            message: last_message,
        })
    }

    fn parallelism(&self) -> usize {
        self.cfg.parallelism_limit
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{Read, Write};
    use std::net::TcpListener;

    /// Minimal scripted HTTP/1.1 server: answers each connection with the
    /// next status in sequence.
    fn serve(statuses: Vec<u16>) -> String {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        std::thread::spawn(move || {
            for status in statuses {
                let (mut stream, _) = listener.accept().unwrap();
                let mut buf = [0u8; 4096];
                let _ = stream.read(&mut buf);
                let body = if status == 200 {
                    r#"{"choices":[{"message":{"content":"Answer: WALKING"}}]}"#.to_string()
                } else {
                    r#"{"error":"scripted failure"}"#.to_string()
                };
                let reason = match status {
                    200 => "OK",
                    429 => "Too Many Requests",
                    400 => "Bad Request",
                    _ => "Error",
                };
                let response = format!(
                    "HTTP/1.1 {status} {reason}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                    body.len()
                );
                let _ = stream.write_all(response.as_bytes());
            }
        });
        format!("http://{addr}/v1/chat/completions")
    }

    fn cfg(url: String) -> ProviderConfig {
        ProviderConfig {
            name: "test".into(),
            base_url: url,
            model_id: "test-model".into(),
            api_key_env_var: None,
            retry_base_ms: 1,
            max_retries: 3,
            ..ProviderConfig::default()
        }
    }

    fn request() -> CompletionRequest {
        CompletionRequest {
            prompt: "classify".into(),
            tag: "s0".into(),
        }
    }

    #[test]
    fn success_on_first_attempt() {
        let provider = HttpProvider::new(cfg(serve(vec![200]))).unwrap();
        let completion = provider.complete(&request()).unwrap();
        assert_eq!(completion.text, "Answer: WALKING");
        assert_eq!(completion.attempt_count, 1);
    }

    #[test]
    fn retries_through_two_429s() {
        let provider = HttpProvider::new(cfg(serve(vec![429, 429, 200]))).unwrap();
        let completion = provider.complete(&request()).unwrap();
        assert_eq!(completion.attempt_count, 3);
    }

    #[test]
    fn non_retryable_400_fails_fast() {
        let provider = HttpProvider::new(cfg(serve(vec![400]))).unwrap();
        let err = provider.complete(&request()).unwrap_err();
        match err {
            GatewayError::Provider { status, excerpt } => {
                assert_eq!(status, 400);
                assert!(excerpt.contains("scripted failure"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn exhaustion_reports_attempts() {
        let provider = HttpProvider::new(cfg(serve(vec![500, 500, 500, 500]))).unwrap();
        let err = provider.complete(&request()).unwrap_err();
        match err {
            GatewayError::Exhausted { attempts, .. } => assert_eq!(attempts, 4),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn missing_api_key_fails_before_network() {
        let config = ProviderConfig {
            api_key_env_var: Some("SENSELLM_TEST_KEY_THAT_DOES_NOT_EXIST".into()),
            ..cfg("http://127.0.0.1:9/never".into())
        };
        let err = HttpProvider::new(config).unwrap_err();
        assert!(matches!(err, GatewayError::MissingApiKey(_)));
        assert!(err.is_config());
    }
}
