//! `--config` handling: a JSON object merged under explicit flags.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::error::CliError;

/// Recursively overlays `top` onto `base`; objects merge key by key, any
/// other value in `top` replaces the one in `base`.
pub fn merge(base: Value, top: Value) -> Value {
    match (base, top) {
        (Value::Object(mut b), Value::Object(t)) => {
            for (k, v) in t {
                let merged = match b.remove(&k) {
                    Some(old) => merge(old, v),
                    None => v,
                };
                b.insert(k, merged);
            }
            Value::Object(b)
        }
        (_, top) => top,
    }
}

#[derive(Debug, Clone, Default)]
pub struct ConfigFile(Value);

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(ConfigFile(Value::Object(Map::new())));
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        if !value.is_object() {
            return Err(CliError::Usage(format!("config {} must be a JSON object", path.display())));
        }
        Ok(ConfigFile(value))
    }

    /// Top-level key of the config file, if present.
    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.0.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| CliError::Usage(format!("config key {key:?}: {e}"))),
        }
    }

    /// Deserializes the config file overlaid with `flags`. Flag entries that
    /// are `null` (not given) are dropped first so they never mask the file.
    pub fn resolve<T: DeserializeOwned>(&self, flags: Value) -> Result<T, CliError> {
        let merged = merge(self.0.clone(), strip_nulls(flags));
        serde_json::from_value(merged).map_err(|e| CliError::Usage(format!("invalid configuration: {e}")))
    }
}

fn strip_nulls(v: Value) -> Value {
    match v {
        Value::Object(m) => Value::Object(
            m.into_iter()
                .filter(|(_, v)| !v.is_null())
                .map(|(k, v)| (k, strip_nulls(v)))
                .collect(),
        ),
        v => v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flags_win_and_nulls_do_not_mask() {
        let file = ConfigFile(json!({"alpha": 0.5, "num_scales": 3, "nested": {"a": 1, "b": 2}}));
        let v: Value = file
            .resolve(json!({"alpha": 0.2, "num_scales": null, "nested": {"b": 9}}))
            .unwrap();
        assert_eq!(v, json!({"alpha": 0.2, "num_scales": 3, "nested": {"a": 1, "b": 9}}));
    }
}
