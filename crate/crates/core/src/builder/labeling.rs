//! Checks on the JSON documents returned by the labeling model.
//!
//! Expected shape: `{"parts": [{"Q1": "...", "Q2": "...", "Q3": "Yes"|"No"}, ...]}`.
//! Any object-level fields besides `parts` are ignored.

use serde::Serialize;
use serde_json::Value;

use super::record::MAX_Q2_WORDS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
    Fatal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub severity: Severity,
    /// Index into `parts`, when the problem is part-specific.
    pub part: Option<usize>,
    pub field: String,
    pub message: String,
}

impl Violation {
    fn new(
        severity: Severity,
        part: Option<usize>,
        field: &str,
        message: impl Into<String>,
    ) -> Self {
        Self {
            severity,
            part,
            field: field.to_string(),
            message: message.into(),
        }
    }
}

/// Validates one labeling response. An empty result means the document is
/// well formed.
pub fn validate_labeling_json(document: &str) -> Vec<Violation> {
    let root: Value = match serde_json::from_str(document) {
        Ok(v) => v,
        Err(e) => {
            return vec![Violation::new(
                Severity::Fatal,
                None,
                "document",
                e.to_string(),
            )]
        }
    };
    let Some(parts) = root.get("parts").and_then(Value::as_array) else {
        return vec![Violation::new(
            Severity::Error,
            None,
            "parts",
            "missing or not an array",
        )];
    };

    let mut out = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        if !part.is_object() {
            out.push(Violation::new(
                Severity::Error,
                Some(i),
                "part",
                "not an object",
            ));
            continue;
        }
        for field in ["Q1", "Q2"] {
            match part.get(field) {
                None => out.push(Violation::new(Severity::Error, Some(i), field, "missing")),
                Some(Value::String(s)) if s.trim().is_empty() => {
                    out.push(Violation::new(Severity::Error, Some(i), field, "empty"))
                }
                Some(Value::String(s)) if field == "Q2" => {
                    let n = s.split_whitespace().count();
                    if n > MAX_Q2_WORDS {
                        out.push(Violation::new(
                            Severity::Warning,
                            Some(i),
                            field,
                            format!("{n} words, limit {MAX_Q2_WORDS}"),
                        ));
                    }
                }
                Some(Value::String(_)) => {}
                Some(_) => out.push(Violation::new(
                    Severity::Error,
                    Some(i),
                    field,
                    "not a string",
                )),
            }
        }
        match part.get("Q3") {
            None => out.push(Violation::new(Severity::Error, Some(i), "Q3", "missing")),
            Some(Value::String(s)) if s == "Yes" || s == "No" => {}
            Some(other) => out.push(Violation::new(
                Severity::Error,
                Some(i),
                "Q3",
                format!("expected \"Yes\" or \"No\", found {other}"),
            )),
        }
    }
    out
}
