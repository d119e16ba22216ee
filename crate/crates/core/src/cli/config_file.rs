use std::collections::BTreeMap;
use std::path::Path;

use super::UsageError;

pub(super) const KEYS: [&str; 11] = [
    "lambda", "theta", "r", "alpha", "p0", "p1", "p2", "trials", "window", "seed", "threads",
];

/// Flat `key = value` settings; `#` starts a comment.
#[derive(Debug, Default, Clone, PartialEq)]
pub(super) struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub(super) fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config file {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| UsageError(format!("{}: {}", path.display(), e.0)))
    }

    pub(super) fn parse(text: &str) -> Result<Self, UsageError> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| UsageError(format!("line {}: expected key=value", n + 1)))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(UsageError(format!("line {}: unknown key {key:?}", n + 1)));
            }
            if values
                .insert(key.to_string(), value.trim().to_string())
                .is_some()
            {
                return Err(UsageError(format!("line {}: duplicate key {key:?}", n + 1)));
            }
        }
        Ok(Self { values })
    }

    pub(super) fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, UsageError> {
        self.values
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| UsageError(format!("config key {key}: cannot parse {v:?}")))
            })
            .transpose()
    }
}
