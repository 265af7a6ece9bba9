//! OpenAI-compatible REST provider: `POST {base}/chat/completions` and
//! `POST {base}/embeddings` with JSON bodies. One wire shape covers every
//! compatible endpoint via base-URL substitution; anything else plugs in as
//! its own [`Provider`](super::Provider) implementation.

use std::time::Duration;

use serde::Deserialize;
use serde_json::json;

use super::{GatewayError, Provider, ProviderConfig};

pub struct HttpProvider {
    config: ProviderConfig,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
}

impl HttpProvider {
    /// Reads the credential from the configured environment variable; a
    /// remote provider without its key fails here, before any request.
    pub fn new(config: ProviderConfig) -> Result<HttpProvider, GatewayError> {
        config.validate()?;
        let api_key = match &config.api_key_env {
            Some(var) => Some(
                std::env::var(var).map_err(|_| GatewayError::MissingCredential(var.clone()))?,
            ),
            None => None,
        };
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| GatewayError::Transport(e.to_string()))?;
        Ok(HttpProvider { config, api_key, client })
    }

    pub fn config(&self) -> &ProviderConfig {
        &self.config
    }

    fn post(&self, endpoint: &str, body: serde_json::Value) -> Result<String, GatewayError> {
        let url = format!("{}/{}", self.config.base_url.trim_end_matches('/'), endpoint);
        let mut request = self.client.post(url).json(&body);
        if let Some(key) = &self.api_key {
            request = request.bearer_auth(key);
        }
        let response = request.send().map_err(|e| GatewayError::Transport(e.to_string()))?;
        let status = response.status().as_u16();
        let text = response.text().map_err(|e| GatewayError::Transport(e.to_string()))?;
        if !(200..300).contains(&status) {
            return Err(GatewayError::Http { status, body: text });
        }
        Ok(text)
    }
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: String,
}

#[derive(Deserialize)]
struct EmbeddingResponse {
    data: Vec<EmbeddingDatum>,
}

#[derive(Deserialize)]
struct EmbeddingDatum {
    embedding: Vec<f64>,
}

impl Provider for HttpProvider {
    fn name(&self) -> &str {
        &self.config.name
    }

    fn model(&self) -> &str {
        &self.config.model
    }

    fn decoding_fingerprint(&self) -> String {
        self.config.decoding_fingerprint()
    }

    fn complete(&self, prompt: &str) -> Result<String, GatewayError> {
        let mut body = json!({
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_output_tokens,
        });
        if !self.config.stop.is_empty() {
            body["stop"] = json!(self.config.stop);
        }
        let text = self.post("chat/completions", body)?;
        let parsed: ChatResponse =
            serde_json::from_str(&text).map_err(|e| GatewayError::BadResponse(e.to_string()))?;
        parsed
            .choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| GatewayError::BadResponse("no choices in response".into()))
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, GatewayError> {
        let body = json!({
            "model": self.config.model,
            "input": text,
        });
        let raw = self.post("embeddings", body)?;
        let parsed: EmbeddingResponse =
            serde_json::from_str(&raw).map_err(|e| GatewayError::BadResponse(e.to_string()))?;
        parsed
            .data
            .into_iter()
            .next()
            .map(|d| d.embedding)
            .ok_or_else(|| GatewayError::BadResponse("no data in embedding response".into()))
    }
}
