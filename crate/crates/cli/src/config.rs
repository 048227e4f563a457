//! Flat JSON config files. Keys mirror the long flag names; `_` and `-`
//! are interchangeable.

use crate::CliError;
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::Path;

pub const PARAM_KEYS: &[&str] = &[
    "j", "alpha", "gamma", "delta", "omega0", "omega", "b0", "eta", "f0", "g", "h", "eta0", "tau",
    "g1", "g2", "T", "chi",
];

const OTHER_KEYS: &[&str] = &[
    "family",
    "k-max",
    "truncation",
    "t-start",
    "t-end",
    "samples",
    "method",
    "probabilities",
    "cost-exponent",
    "output",
    "format",
    "plot",
    "tol",
    "threads",
    "x",
    "x-range",
    "y",
    "y-range",
    "summary",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, Value>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| CliError::Usage(format!("config is not valid JSON: {e}")))?;
        let Value::Object(map) = v else {
            return Err(CliError::Usage("config must be a flat JSON object".into()));
        };
        let mut entries = BTreeMap::new();
        for (k, v) in map {
            let key = if PARAM_KEYS.contains(&k.as_str()) {
                k
            } else {
                k.replace('_', "-")
            };
            if !PARAM_KEYS.contains(&key.as_str()) && !OTHER_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("unknown config key '{key}'")));
            }
            if v.is_object() || v.is_array() {
                return Err(CliError::Usage(format!(
                    "config key '{key}' must be a scalar"
                )));
            }
            entries.insert(key, v);
        }
        Ok(Config { entries })
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|k| k.as_str())
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(v) => v.as_f64().map(Some).ok_or_else(|| bad(key, "a number")),
        }
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(Some)
                .ok_or_else(|| bad(key, "a non-negative integer")),
        }
    }

    pub fn str(&self, key: &str) -> Result<Option<String>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(bad(key, "a string")),
        }
    }

    pub fn bool(&self, key: &str) -> Result<Option<bool>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(Value::Bool(b)) => Ok(Some(*b)),
            Some(_) => Err(bad(key, "true or false")),
        }
    }
}

fn bad(key: &str, what: &str) -> CliError {
    CliError::Usage(format!("config key '{key}' must be {what}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_and_types() {
        let c = Config::parse(
            r#"{"family": "h1", "t_end": 5, "f0": 3, "T": 1.5, "probabilities": true}"#,
        )
        .unwrap();
        assert_eq!(c.str("family").unwrap().as_deref(), Some("h1"));
        assert_eq!(c.f64("t-end").unwrap(), Some(5.0));
        assert_eq!(c.f64("T").unwrap(), Some(1.5));
        assert_eq!(c.bool("probabilities").unwrap(), Some(true));
        assert!(c.str("f0").is_err());
    }

    #[test]
    fn rejects_unknown_and_nested() {
        assert!(Config::parse(r#"{"bogus": 1}"#).is_err());
        assert!(Config::parse(r#"{"j": [1]}"#).is_err());
        assert!(Config::parse("[1, 2]").is_err());
    }
}
