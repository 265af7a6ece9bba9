//! Provider-agnostic access to chat-completion and embedding endpoints with
//! deterministic decoding, a durable append-only cache, bounded retries,
//! rate limiting, and in-flight request de-duplication.
//!
//! Identical inputs always return identical outputs once cached: replaying
//! any call sequence against a populated cache performs zero network
//! requests.

mod cache;
mod http;
mod limiter;
mod mock;

pub use cache::{Cache, CachedExchange, ExchangeKind, TokenUsage};
pub use http::HttpProvider;
pub use limiter::{Clock, RateLimiter, SystemClock};
pub use mock::{MatchKind, MockProvider, MockRule, MockScript};

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("environment variable `{0}` with the provider credential is not set")]
    MissingCredential(String),
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("provider returned HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("provider response had an unexpected shape: {0}")]
    BadResponse(String),
    #[error("rate budget exhausted; retry after {0:?}")]
    Throttled(Duration),
    #[error("no scripted answer matches the prompt: {0:?}")]
    UnmatchedPrompt(String),
    #[error("conflicting mock rules: {0}")]
    ConflictingRules(String),
    #[error("text to embed must be nonempty")]
    EmptyText,
    #[error("embedding dimension {got} does not match the established {expected} for this model; cache or provider is corrupt")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("provider returned a zero vector; cannot normalize")]
    ZeroVector,
    #[error("cache record {line} is corrupt (only a trailing partial record is tolerated)")]
    CacheCorrupt { line: usize },
    #[error("cache entry for this key holds a {found:?} exchange, expected {expected:?}")]
    WrongExchangeKind { expected: ExchangeKind, found: ExchangeKind },
    #[error("cache io: {0}")]
    Io(#[from] std::io::Error),
    #[error("requests-per-minute budget must be positive")]
    ZeroBudget,
    #[error("reading provider or script file: {0}")]
    Parse(#[from] serde_json::Error),
}

impl GatewayError {
    /// Errors worth retrying with backoff: transient transport failures and
    /// throttling-flavored HTTP statuses.
    pub fn is_retryable(&self) -> bool {
        match self {
            GatewayError::Transport(_) => true,
            GatewayError::Http { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

fn default_temperature() -> f64 {
    0.0
}
fn default_max_tokens() -> u32 {
    256
}
fn default_timeout() -> u64 {
    30
}
fn default_retries() -> u32 {
    3
}
fn default_rpm() -> u32 {
    60
}

/// Connection and decoding settings for a remote provider. Decoding is
/// deterministic by default: temperature 0 and no sampling parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProviderConfig {
    pub name: String,
    pub base_url: String,
    pub model: String,
    /// Environment variable holding the API key; None for keyless endpoints.
    #[serde(default)]
    pub api_key_env: Option<String>,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_output_tokens: u32,
    #[serde(default)]
    pub stop: Vec<String>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default = "default_rpm")]
    pub requests_per_minute: u32,
}

impl ProviderConfig {
    pub fn validate(&self) -> Result<(), GatewayError> {
        if self.requests_per_minute == 0 {
            return Err(GatewayError::ZeroBudget);
        }
        Ok(())
    }

    /// The decoding parameters that participate in cache keys.
    pub fn decoding_fingerprint(&self) -> String {
        serde_json::json!({
            "temperature": self.temperature,
            "max_tokens": self.max_output_tokens,
            "stop": self.stop,
        })
        .to_string()
    }
}

/// A single-attempt text/embedding backend. Retries, caching, rate limiting
/// and de-duplication live in [`Gateway`].
pub trait Provider: Send + Sync {
    fn name(&self) -> &str;
    fn model(&self) -> &str;
    fn decoding_fingerprint(&self) -> String;
    fn complete(&self, prompt: &str) -> Result<String, GatewayError>;
    fn embed(&self, text: &str) -> Result<Vec<f64>, GatewayError>;
}

/// Cache key: digest of provider name, model id, decoding parameters,
/// exchange kind, and the full prompt, each length-prefixed.
pub fn cache_key(
    provider: &str,
    model: &str,
    fingerprint: &str,
    kind: ExchangeKind,
    prompt: &str,
) -> String {
    let mut hasher = Sha256::new();
    for field in [
        provider,
        model,
        fingerprint,
        match kind {
            ExchangeKind::Chat => "chat",
            ExchangeKind::Embedding => "embedding",
        },
        prompt,
    ] {
        hasher.update((field.len() as u64).to_le_bytes());
        hasher.update(field.as_bytes());
    }
    hex_string(&hasher.finalize())
}

pub(crate) fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Normalizes to unit L2 norm in f64.
fn normalize(mut v: Vec<f64>) -> Result<Vec<f64>, GatewayError> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(GatewayError::ZeroVector);
    }
    for x in &mut v {
        *x /= norm;
    }
    Ok(v)
}

pub struct GatewayOptions {
    pub cache_path: Option<PathBuf>,
    /// None disables rate limiting (in-process providers).
    pub requests_per_minute: Option<u32>,
    pub max_retries: u32,
    pub backoff: Duration,
    /// When set, an exhausted budget surfaces as a throttled error instead
    /// of sleeping until a slot frees up.
    pub fail_on_throttle: bool,
    pub clock: Arc<dyn Clock>,
}

impl Default for GatewayOptions {
    fn default() -> Self {
        GatewayOptions {
            cache_path: None,
            requests_per_minute: None,
            max_retries: 3,
            backoff: Duration::from_millis(250),
            fail_on_throttle: false,
            clock: Arc::new(SystemClock::default()),
        }
    }
}

/// The caching front door to a provider.
pub struct Gateway {
    provider: Box<dyn Provider>,
    cache: Cache,
    limiter: Option<RateLimiter>,
    clock: Arc<dyn Clock>,
    max_retries: u32,
    backoff: Duration,
    fail_on_throttle: bool,
    network_calls: AtomicUsize,
    in_flight: Mutex<BTreeSet<String>>,
    in_flight_done: Condvar,
    embed_dim: Mutex<Option<usize>>,
}

impl Gateway {
    pub fn new(provider: Box<dyn Provider>, options: GatewayOptions) -> Result<Gateway, GatewayError> {
        let cache = match &options.cache_path {
            Some(path) => Cache::open(path)?,
            None => Cache::in_memory(),
        };
        let limiter = options
            .requests_per_minute
            .map(|budget| RateLimiter::per_minute(budget, options.clock.clone()));
        Ok(Gateway {
            provider,
            cache,
            limiter,
            clock: options.clock,
            max_retries: options.max_retries,
            backoff: options.backoff,
            fail_on_throttle: options.fail_on_throttle,
            network_calls: AtomicUsize::new(0),
            in_flight: Mutex::new(BTreeSet::new()),
            in_flight_done: Condvar::new(),
            embed_dim: Mutex::new(None),
        })
    }

    pub fn provider_name(&self) -> &str {
        self.provider.name()
    }

    pub fn model(&self) -> &str {
        self.provider.model()
    }

    /// Number of provider invocations performed so far (each retry counts).
    pub fn network_calls(&self) -> usize {
        self.network_calls.load(Ordering::SeqCst)
    }

    pub fn cache_len(&self) -> usize {
        self.cache.len()
    }

    /// Chat completion for a prompt. Cache hits return the stored text
    /// without touching the provider; misses perform the request with
    /// bounded retries and exponential backoff, then append to the cache.
    pub fn complete(&self, prompt: &str) -> Result<String, GatewayError> {
        let key = cache_key(
            self.provider.name(),
            self.provider.model(),
            &self.provider.decoding_fingerprint(),
            ExchangeKind::Chat,
            prompt,
        );
        let exchange = self.resolve(&key, ExchangeKind::Chat, prompt, || {
            self.provider.complete(prompt)
        })?;
        Ok(exchange.response)
    }

    /// Embedding for a text, normalized to unit L2 norm. The dimension must
    /// stay constant across calls; a mismatch against earlier results (or a
    /// warm cache) reports corruption.
    pub fn embed(&self, text: &str) -> Result<Vec<f64>, GatewayError> {
        if text.is_empty() {
            return Err(GatewayError::EmptyText);
        }
        let key = cache_key(
            self.provider.name(),
            self.provider.model(),
            &self.provider.decoding_fingerprint(),
            ExchangeKind::Embedding,
            text,
        );
        let exchange = self.resolve(&key, ExchangeKind::Embedding, text, || {
            let raw = self.provider.embed(text)?;
            let unit = normalize(raw)?;
            Ok(serde_json::to_string(&unit).expect("vector serializes"))
        })?;
        let vector: Vec<f64> = serde_json::from_str(&exchange.response)
            .map_err(|e| GatewayError::BadResponse(format!("cached embedding: {e}")))?;
        let mut dim = self.embed_dim.lock().expect("embed dim lock");
        match *dim {
            Some(expected) if expected != vector.len() => {
                return Err(GatewayError::DimensionMismatch { expected, got: vector.len() })
            }
            Some(_) => {}
            None => *dim = Some(vector.len()),
        }
        Ok(vector)
    }

    /// Cache lookup, in-flight claim, rate-limited retried request, cache
    /// append, in deterministic replay-safe order.
    fn resolve(
        &self,
        key: &str,
        kind: ExchangeKind,
        prompt: &str,
        request: impl Fn() -> Result<String, GatewayError>,
    ) -> Result<CachedExchange, GatewayError> {
        loop {
            if let Some(hit) = self.cache.get(key) {
                if hit.kind != kind {
                    return Err(GatewayError::WrongExchangeKind { expected: kind, found: hit.kind });
                }
                return Ok(hit);
            }
            {
                let mut in_flight = self.in_flight.lock().expect("in-flight lock");
                if in_flight.contains(key) {
                    // Someone else is fetching this key; wait for any
                    // completion and re-check the cache.
                    let _unused = self
                        .in_flight_done
                        .wait(in_flight)
                        .expect("in-flight wait");
                    continue;
                }
                in_flight.insert(key.to_string());
            }
            let result = self.request_with_retries(&request);
            let outcome = result.and_then(|response| {
                let exchange = CachedExchange {
                    key: key.to_string(),
                    kind,
                    prompt: prompt.to_string(),
                    response,
                    model: self.provider.model().to_string(),
                    timestamp: now_unix_seconds(),
                    usage: None,
                };
                self.cache.put(exchange.clone())?;
                Ok(exchange)
            });
            {
                let mut in_flight = self.in_flight.lock().expect("in-flight lock");
                in_flight.remove(key);
            }
            self.in_flight_done.notify_all();
            return outcome;
        }
    }

    fn request_with_retries(
        &self,
        request: &impl Fn() -> Result<String, GatewayError>,
    ) -> Result<String, GatewayError> {
        let mut attempt = 0;
        loop {
            if let Some(limiter) = &self.limiter {
                if self.fail_on_throttle {
                    limiter.try_acquire().map_err(GatewayError::Throttled)?;
                } else {
                    limiter.acquire();
                }
            }
            self.network_calls.fetch_add(1, Ordering::SeqCst);
            match request() {
                Ok(response) => return Ok(response),
                Err(e) if e.is_retryable() && attempt < self.max_retries => {
                    let wait = self.backoff * 2u32.saturating_pow(attempt);
                    self.clock.sleep(wait);
                    attempt += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
}

fn now_unix_seconds() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
