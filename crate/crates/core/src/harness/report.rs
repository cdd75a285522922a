//! Check records and their JSON/CSV rendering.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Hex SHA-256 of the canonical JSON of a configuration object.
pub fn config_digest<T: Serialize + ?Sized>(config: &T) -> String {
    let bytes = serde_json::to_vec(config).expect("configuration serialises");
    hex::encode(Sha256::digest(&bytes))
}

/// JSON number for finite values, `null` otherwise.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub digest: String,
    pub pass: bool,
    pub tolerance: Option<f64>,
    pub observed: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn new(id: impl Into<String>, digest: impl Into<String>, pass: bool) -> CheckRecord {
        CheckRecord { id: id.into(), digest: digest.into(), pass, tolerance: None, observed: BTreeMap::new(), note: None }
    }

    pub fn tolerance(mut self, tol: f64) -> CheckRecord {
        self.tolerance = Some(tol);
        self
    }

    pub fn observe(mut self, key: &str, value: impl Into<Value>) -> CheckRecord {
        self.observed.insert(key.to_string(), value.into());
        self
    }

    pub fn observe_num(self, key: &str, value: f64) -> CheckRecord {
        self.observe(key, num(value))
    }

    pub fn note(mut self, note: impl Into<String>) -> CheckRecord {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportDoc {
    pub tool: String,
    pub version: String,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
}

impl ReportDoc {
    pub fn new(records: Vec<CheckRecord>) -> ReportDoc {
        let passed = records.iter().filter(|r| r.pass).count();
        ReportDoc {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            summary: Summary { total: records.len(), passed, failed: records.len() - passed },
            records,
        }
    }

    pub fn merge(docs: impl IntoIterator<Item = ReportDoc>) -> ReportDoc {
        ReportDoc::new(docs.into_iter().flat_map(|d| d.records).collect())
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// Long format: one row per observed quantity.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Config(format!("csv: {e}"));
        w.write_record(["id", "pass", "tolerance", "digest", "quantity", "value"]).map_err(io)?;
        for r in &self.records {
            let tol = r.tolerance.map(|t| t.to_string()).unwrap_or_default();
            let pass = r.pass.to_string();
            if r.observed.is_empty() {
                w.write_record([r.id.as_str(), &pass, &tol, &r.digest, "", ""]).map_err(io)?;
            }
            for (k, v) in &r.observed {
                let value = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                w.write_record([r.id.as_str(), &pass, &tol, &r.digest, k, &value]).map_err(io)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}
