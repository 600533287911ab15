//! Deterministic mock provider for offline runs and tests.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::digest::sha256_hex;

use super::{Completion, CompletionProvider, CompletionRequest, GatewayError};

/// On-disk mock script.
///
/// `script` mode replays a list of responses in call order; `transcript`
/// mode answers by SHA-256 digest of the prompt; `tagged` mode answers by
/// request tag (the harness tags requests with sample ids, which is how an
/// oracle mock echoes ground truth).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum MockScript {
    Script { responses: Vec<String> },
    Transcript { responses: BTreeMap<String, String> },
    Tagged { responses: BTreeMap<String, String> },
}

/// Scripted completion provider. Latency is always reported as zero so mock
/// runs are byte-identical.
pub struct MockProvider {
    script: MockScript,
    cursor: Mutex<usize>,
    calls: Mutex<Vec<String>>,
}

impl MockProvider {
    pub fn new(script: MockScript) -> Self {
        Self {
            script,
            cursor: Mutex::new(0),
            calls: Mutex::new(Vec::new()),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, GatewayError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GatewayError::InvalidConfig(format!("{}: {e}", path.display())))?;
        let script: MockScript = serde_json::from_str(&text)
            .map_err(|e| GatewayError::InvalidConfig(format!("{}: {e}", path.display())))?;
        Ok(Self::new(script))
    }

    /// Mock that answers every request tag with `Answer: <value>`.
    pub fn oracle(answers: impl IntoIterator<Item = (String, String)>) -> Self {
        let responses = answers
            .into_iter()
            .map(|(tag, value)| (tag, format!("Answer: {value}")))
            .collect();
        Self::new(MockScript::Tagged { responses })
    }

    /// Prompts seen so far, in call order.
    pub fn calls(&self) -> Vec<String> {
        self.calls.lock().expect("mock call log poisoned").clone()
    }
}

impl CompletionProvider for MockProvider {
    fn complete(&self, request: &CompletionRequest) -> Result<Completion, GatewayError> {
        self.calls
            .lock()
            .expect("mock call log poisoned")
            .push(request.prompt.clone());
        let text = match &self.script {
            MockScript::Script { responses } => {
                let mut cursor = self.cursor.lock().expect("mock cursor poisoned");
                let text = responses
                    .get(*cursor % responses.len().max(1))
                    .cloned()
                    .ok_or_else(|| GatewayError::MockMiss(request.tag.clone()))?;
                *cursor += 1;
                text
            }
            MockScript::Transcript { responses } => {
                let digest = sha256_hex(request.prompt.as_bytes());
                responses
                    .get(&digest)
                    .cloned()
                    .ok_or(GatewayError::MockMiss(digest))?
            }
            MockScript::Tagged { responses } => responses
                .get(&request.tag)
                .cloned()
                .ok_or_else(|| GatewayError::MockMiss(request.tag.clone()))?,
        };
        Ok(Completion {
            text,
            provider_latency_ms: 0,
            attempt_count: 1,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(tag: &str) -> CompletionRequest {
        CompletionRequest {
            prompt: format!("prompt for {tag}"),
            tag: tag.into(),
        }
    }

    #[test]
    fn script_mode_cycles_in_order() {
        let mock = MockProvider::new(MockScript::Script {
            responses: vec!["Answer: WALKING".into(), "Answer: STANDING".into()],
        });
        assert_eq!(mock.complete(&request("a")).unwrap().text, "Answer: WALKING");
        assert_eq!(mock.complete(&request("b")).unwrap().text, "Answer: STANDING");
        assert_eq!(mock.complete(&request("c")).unwrap().text, "Answer: WALKING");
        assert_eq!(mock.complete(&request("a")).unwrap().attempt_count, 1);
    }

    #[test]
    fn transcript_mode_keys_by_prompt_digest() {
        let digest = sha256_hex(b"prompt for a");
        let mut responses = BTreeMap::new();
        responses.insert(digest, "Answer: N".to_string());
        let mock = MockProvider::new(MockScript::Transcript { responses });
        assert_eq!(mock.complete(&request("a")).unwrap().text, "Answer: N");
        assert!(matches!(
            mock.complete(&request("unknown")),
            Err(GatewayError::MockMiss(_))
        ));
    }

    #[test]
    fn oracle_mode_echoes_ground_truth() {
        let mock = MockProvider::oracle(vec![("s0".to_string(), "WALKING".to_string())]);
        assert_eq!(mock.complete(&request("s0")).unwrap().text, "Answer: WALKING");
        assert_eq!(mock.calls().len(), 1);
    }
}
