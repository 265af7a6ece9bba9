//! Scripted in-process provider for tests and deterministic end-to-end
//! runs. Answers come from exact-match or substring rules; embeddings are
//! seeded deterministically from the text.

use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{GatewayError, Provider};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchKind {
    Exact,
    Contains,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MockRule {
    #[serde(rename = "match")]
    pub kind: MatchKind,
    pub pattern: String,
    pub answer: String,
}

fn default_name() -> String {
    "mock".into()
}
fn default_model() -> String {
    "mock-model".into()
}
fn default_embed_dim() -> usize {
    16
}
fn default_strict() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MockScript {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "default_model")]
    pub model: String,
    /// Strict scripts error on unmatched prompts; lenient ones answer with
    /// the sentinel.
    #[serde(default = "default_strict")]
    pub strict: bool,
    #[serde(default)]
    pub sentinel: Option<String>,
    #[serde(default)]
    pub rules: Vec<MockRule>,
    #[serde(default = "default_embed_dim")]
    pub embed_dim: usize,
}

impl Default for MockScript {
    fn default() -> Self {
        MockScript {
            name: default_name(),
            model: default_model(),
            strict: default_strict(),
            sentinel: None,
            rules: Vec::new(),
            embed_dim: default_embed_dim(),
        }
    }
}

impl MockScript {
    pub fn lenient(sentinel: impl Into<String>) -> MockScript {
        MockScript { strict: false, sentinel: Some(sentinel.into()), ..MockScript::default() }
    }

    pub fn exact(&mut self, prompt: impl Into<String>, answer: impl Into<String>) -> &mut Self {
        self.rules.push(MockRule {
            kind: MatchKind::Exact,
            pattern: prompt.into(),
            answer: answer.into(),
        });
        self
    }

    pub fn contains(&mut self, pattern: impl Into<String>, answer: impl Into<String>) -> &mut Self {
        self.rules.push(MockRule {
            kind: MatchKind::Contains,
            pattern: pattern.into(),
            answer: answer.into(),
        });
        self
    }

    pub fn load(path: impl AsRef<Path>) -> Result<MockScript, GatewayError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Builds a scripted provider, rejecting rule sets where two rules could
/// match the same prompt with different answers.
pub fn mock_provider(script: MockScript) -> Result<MockProvider, GatewayError> {
    MockProvider::new(script)
}

pub struct MockProvider {
    script: MockScript,
    exact: BTreeMap<String, String>,
}

impl MockProvider {
    pub fn new(script: MockScript) -> Result<MockProvider, GatewayError> {
        for (i, a) in script.rules.iter().enumerate() {
            for b in &script.rules[i + 1..] {
                if a.answer == b.answer {
                    continue;
                }
                let overlap = match (a.kind, b.kind) {
                    (MatchKind::Exact, MatchKind::Exact) => a.pattern == b.pattern,
                    (MatchKind::Contains, MatchKind::Contains) => {
                        a.pattern.contains(&b.pattern) || b.pattern.contains(&a.pattern)
                    }
                    (MatchKind::Exact, MatchKind::Contains) => a.pattern.contains(&b.pattern),
                    (MatchKind::Contains, MatchKind::Exact) => b.pattern.contains(&a.pattern),
                };
                if overlap {
                    return Err(GatewayError::ConflictingRules(format!(
                        "{:?} and {:?} can both match one prompt with different answers",
                        a.pattern, b.pattern
                    )));
                }
            }
        }
        let exact = script
            .rules
            .iter()
            .filter(|r| r.kind == MatchKind::Exact)
            .map(|r| (r.pattern.clone(), r.answer.clone()))
            .collect();
        Ok(MockProvider { script, exact })
    }
}

impl Provider for MockProvider {
    fn name(&self) -> &str {
        &self.script.name
    }

    fn model(&self) -> &str {
        &self.script.model
    }

    fn decoding_fingerprint(&self) -> String {
        "{\"mock\":true}".into()
    }

    fn complete(&self, prompt: &str) -> Result<String, GatewayError> {
        if let Some(answer) = self.exact.get(prompt) {
            return Ok(answer.clone());
        }
        for rule in &self.script.rules {
            if rule.kind == MatchKind::Contains && prompt.contains(&rule.pattern) {
                return Ok(rule.answer.clone());
            }
        }
        if self.script.strict {
            return Err(GatewayError::UnmatchedPrompt(prompt.to_string()));
        }
        Ok(self
            .script
            .sentinel
            .clone()
            .unwrap_or_else(|| "UNSCRIPTED".to_string()))
    }

    /// Deterministic pseudo-embedding: the text's digest seeds a generator
    /// that fills the configured dimension. The gateway normalizes.
    fn embed(&self, text: &str) -> Result<Vec<f64>, GatewayError> {
        let digest = Sha256::digest(text.as_bytes());
        let mut seed = [0u8; 32];
        seed.copy_from_slice(&digest);
        let mut rng = ChaCha8Rng::from_seed(seed);
        Ok((0..self.script.embed_dim)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect())
    }
}
