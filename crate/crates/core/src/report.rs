//! Command results and their JSON and text renderings.
//!
//! Integers are written as decimal strings so that values of any size survive
//! a JSON round trip.

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommandResult {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub output: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Wall time in milliseconds, only present with `--timing`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub millis: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub results: Vec<CommandResult>,
}

impl Report {
    pub fn new(results: Vec<CommandResult>) -> Self {
        Self { schema: SCHEMA, results }
    }

    pub fn is_ok(&self) -> bool {
        self.results.iter().all(|r| r.ok)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// One block per command with keys padded to a common width.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            match &r.target {
                Some(t) => out.push_str(&format!("== {} {} ==\n", r.command, t)),
                None => out.push_str(&format!("== {} ==\n", r.command)),
            }
            let mut rows: Vec<(String, String)> = Vec::new();
            if let Some(e) = &r.error {
                rows.push(("error".into(), e.clone()));
            }
            if let Value::Object(map) = &r.output {
                for (k, v) in map {
                    rows.push((k.clone(), inline(v)));
                }
            } else if !r.output.is_null() {
                rows.push(("value".into(), inline(&r.output)));
            }
            if let Some(ms) = &r.millis {
                rows.push(("time".into(), format!("{ms} ms")));
            }
            let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
            for (k, v) in rows {
                out.push_str(&format!("  {k:<width$}  {v}\n"));
            }
        }
        out
    }
}

/// Compact rendering without quotes around the integer strings.
fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(xs) => format!("[{}]", xs.iter().map(inline).collect::<Vec<_>>().join(", ")),
        Value::Object(m) => {
            let parts: Vec<String> = m.iter().map(|(k, v)| format!("{k}: {}", inline(v))).collect();
            format!("{{{}}}", parts.join(", "))
        }
        other => other.to_string(),
    }
}

/// An integer as a JSON string.
pub fn int(x: impl ToString) -> Value {
    Value::String(x.to_string())
}

pub fn ints<T: ToString>(xs: impl IntoIterator<Item = T>) -> Value {
    Value::Array(xs.into_iter().map(int).collect())
}

pub fn int_rows<T: ToString, R: IntoIterator<Item = T>>(rows: impl IntoIterator<Item = R>) -> Value {
    Value::Array(rows.into_iter().map(ints).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn json_round_trip_and_text() {
        let r = Report::new(vec![
            CommandResult {
                command: "chi".into(),
                target: Some("A".into()),
                ok: true,
                output: json!({ "matrix": int_rows([[2, 3], [1, 2]]) }),
                error: None,
                millis: None,
            },
            CommandResult {
                command: "gldim".into(),
                target: Some("B".into()),
                ok: false,
                output: Value::Null,
                error: Some("boom".into()),
                millis: None,
            },
        ]);
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_json().contains("\"schema\": 1"));
        assert_eq!(r.to_text(), "== chi A ==\n  matrix  [[2, 3], [1, 2]]\n== gldim B ==\n  error  boom\n");
        assert!(!r.is_ok());
    }
}
