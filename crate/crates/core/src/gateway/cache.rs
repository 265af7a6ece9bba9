//! Durable exchange cache: one JSON record per line, append-only.
//!
//! A record only counts once its line is newline-terminated, so a crash
//! mid-append leaves a partial trailing record that the next open truncates
//! away. Corruption anywhere else is an error.

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use serde::{Deserialize, Serialize};

use super::GatewayError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExchangeKind {
    Chat,
    Embedding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenUsage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

/// One cached prompt/response exchange. The key is a pure function of
/// (provider name, model id, decoding parameters, kind, prompt).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CachedExchange {
    pub key: String,
    pub kind: ExchangeKind,
    pub prompt: String,
    pub response: String,
    pub model: String,
    pub timestamp: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub usage: Option<TokenUsage>,
}

/// Thread-safe cache: concurrent readers, single-writer appends.
pub struct Cache {
    entries: RwLock<HashMap<String, CachedExchange>>,
    writer: Option<Mutex<std::fs::File>>,
    path: Option<PathBuf>,
}

impl Cache {
    pub fn in_memory() -> Cache {
        Cache { entries: RwLock::new(HashMap::new()), writer: None, path: None }
    }

    /// Opens (or creates) a cache file, loading every record. A partial
    /// trailing record is dropped by truncating the file; a malformed record
    /// anywhere else is a corruption error naming its line.
    pub fn open(path: impl AsRef<Path>) -> Result<Cache, GatewayError> {
        let path = path.as_ref().to_path_buf();
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let mut entries = HashMap::new();
        let mut valid_bytes = 0u64;
        let mut needs_truncation = false;
        if path.exists() {
            let text = std::fs::read_to_string(&path)?;
            let mut offset = 0usize;
            for (line_no, segment) in text.split_inclusive('\n').enumerate() {
                let terminated = segment.ends_with('\n');
                let line = segment.trim_end_matches('\n');
                let is_last = offset + segment.len() == text.len();
                if line.is_empty() {
                    offset += segment.len();
                    if terminated {
                        valid_bytes = offset as u64;
                    }
                    continue;
                }
                match serde_json::from_str::<CachedExchange>(line) {
                    Ok(record) if terminated => {
                        entries.insert(record.key.clone(), record);
                        offset += segment.len();
                        valid_bytes = offset as u64;
                    }
                    _ if is_last => {
                        // Partial or malformed tail: drop it.
                        needs_truncation = true;
                        break;
                    }
                    _ => return Err(GatewayError::CacheCorrupt { line: line_no + 1 }),
                }
            }
        }
        if needs_truncation {
            let file = OpenOptions::new().write(true).open(&path)?;
            file.set_len(valid_bytes)?;
        }
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Cache {
            entries: RwLock::new(entries),
            writer: Some(Mutex::new(file)),
            path: Some(path),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache read lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: &str) -> Option<CachedExchange> {
        self.entries.read().expect("cache read lock").get(key).cloned()
    }

    /// Appends one record; the in-memory index is updated after the line is
    /// durably written.
    pub fn put(&self, exchange: CachedExchange) -> Result<(), GatewayError> {
        if let Some(writer) = &self.writer {
            let mut line = serde_json::to_string(&exchange).expect("record serializes");
            line.push('\n');
            let mut file = writer.lock().expect("cache write lock");
            file.write_all(line.as_bytes())?;
            file.flush()?;
        }
        self.entries
            .write()
            .expect("cache write lock")
            .insert(exchange.key.clone(), exchange);
        Ok(())
    }
}
