use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use entangle::Error;

/// Uniform output of every command.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub results: BTreeMap<String, Value>,
    pub warnings: Vec<String>,
    pub wall_time_ms: u64,
}

impl RunReport {
    pub fn new(command: &str, seed: u64) -> Self {
        let mut inputs = BTreeMap::new();
        inputs.insert("seed".to_string(), json!(seed));
        RunReport {
            command: command.to_string(),
            inputs,
            results: BTreeMap::new(),
            warnings: Vec::new(),
            wall_time_ms: 0,
        }
    }

    pub fn input(&mut self, key: &str, v: impl Serialize) {
        self.inputs.insert(key.to_string(), json!(v));
    }

    pub fn put(&mut self, key: &str, v: impl Serialize) {
        self.results.insert(key.to_string(), json!(v));
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    /// serde_json turns NaN/Inf into `null`, so non-finite numbers are
    /// caught here, before serialization.
    pub fn check_finite(&self) -> Result<(), Error> {
        fn walk(path: &str, v: &Value) -> Result<(), String> {
            match v {
                Value::Null => Err(path.to_string()),
                Value::Array(xs) => xs.iter().enumerate().try_for_each(|(i, x)| walk(&format!("{path}[{i}]"), x)),
                Value::Object(m) => m.iter().try_for_each(|(k, x)| walk(&format!("{path}.{k}"), x)),
                _ => Ok(()),
            }
        }
        for (k, v) in &self.results {
            walk(k, v).map_err(|path| Error::InvariantBreach {
                invariant: "finite_results".into(),
                detail: format!("result `{path}` is not a finite number"),
            })?;
        }
        Ok(())
    }
}
