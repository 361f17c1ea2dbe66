//! Flat `key=value` parameter files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys are unique;
//! order is preserved when a file is written back.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use indexmap::IndexMap;

/// Parameter values reported for the reference dataset.
pub const DEFAULTS: &str = include_str!("../defaults.kv");

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing key `{0}`")]
    Missing(String),
    #[error("key `{key}`: cannot parse `{value}`")]
    Value { key: String, value: String },
    #[error("key `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvFile {
    entries: IndexMap<String, String>,
}

impl KvFile {
    pub fn new() -> Self {
        KvFile::default()
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = IndexMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError::Syntax { line: i + 1, message: format!("expected key=value, got `{line}`") });
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(ConfigError::Syntax { line: i + 1, message: "empty key".into() });
            }
            if entries.insert(k.to_string(), v.to_string()).is_some() {
                return Err(ConfigError::Syntax { line: i + 1, message: format!("duplicate key `{k}`") });
            }
        }
        Ok(KvFile { entries })
    }

    pub fn read(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        KvFile::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<(), ConfigError> {
        std::fs::write(path, self.to_string())
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })
    }

    pub fn defaults() -> Self {
        KvFile::parse(DEFAULTS).expect("embedded defaults parse")
    }

    /// Entries of `other` replace or extend this file's entries.
    pub fn overlay(&mut self, other: &KvFile) {
        for (k, v) in &other.entries {
            self.entries.insert(k.clone(), v.clone());
        }
    }

    pub fn set(&mut self, key: &str, value: impl fmt::Display) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| ConfigError::Value { key: key.to_string(), value: v.clone() }),
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, ConfigError> {
        self.get(key)?.ok_or_else(|| ConfigError::Missing(key.to_string()))
    }

    /// A probability in `(0, 1]`.
    pub fn probability(&self, key: &str) -> Result<f64, ConfigError> {
        let v: f64 = self.require(key)?;
        if v > 0.0 && v <= 1.0 {
            Ok(v)
        } else {
            Err(ConfigError::Invalid { key: key.to_string(), message: format!("{v} is not in (0, 1]") })
        }
    }

    pub fn positive(&self, key: &str) -> Result<f64, ConfigError> {
        let v: f64 = self.require(key)?;
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(ConfigError::Invalid { key: key.to_string(), message: format!("{v} is not positive") })
        }
    }
}

impl fmt::Display for KvFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}
