//! Annotated objects and their JSON-lines form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::{text_is_reserved_free, Aabb, GrammarError};

/// Descriptions longer than this many words draw a warning.
pub const MAX_Q2_WORDS: usize = 15;

#[derive(Debug, Clone, PartialEq)]
pub struct PartAnnotation {
    pub bbox: Aabb,
    /// Short part name.
    pub q1: String,
    /// Fine-grained description.
    pub q2: String,
    pub q3_confident: bool,
    /// Replacement description used by modification samples, when the
    /// annotation provides one.
    pub new_description: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaPair {
    #[serde(rename = "q")]
    pub question: String,
    /// Answer text; `<Part_i>` refers to `parts[i]`.
    #[serde(rename = "a")]
    pub answer: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectRecord {
    pub id: String,
    pub caption: String,
    pub parts: Vec<PartAnnotation>,
    pub qa: Vec<QaPair>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecordError {
    #[error("malformed record: {0}")]
    Json(String),
    #[error("record id is empty")]
    EmptyId,
    #[error("part {part}: invalid box: {source}")]
    InvalidBox { part: usize, source: GrammarError },
    #[error("part {part}: {field} is empty")]
    EmptyField { part: usize, field: &'static str },
    #[error("{field} contains a reserved token surface string")]
    ReservedText { field: String },
    #[error("qa {qa}: placeholder <Part_{index}> has no matching part")]
    PlaceholderOutOfRange { qa: usize, index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum Q3Wire {
    Flag(bool),
    Text(YesNo),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum YesNo {
    Yes,
    No,
}

#[derive(Debug, Serialize, Deserialize)]
struct PartWire {
    #[serde(rename = "box")]
    bbox: [f64; 6],
    q1: String,
    q2: String,
    #[serde(default = "default_q3")]
    q3: Q3Wire,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    new_description: Option<String>,
}

fn default_q3() -> Q3Wire {
    Q3Wire::Text(YesNo::Yes)
}

#[derive(Debug, Serialize, Deserialize)]
struct RecordWire {
    id: String,
    #[serde(default)]
    caption: String,
    #[serde(default)]
    parts: Vec<PartWire>,
    #[serde(default)]
    qa: Vec<QaPair>,
}

impl ObjectRecord {
    /// Parses and validates one JSON line.
    pub fn from_json(line: &str) -> Result<Self, RecordError> {
        let wire: RecordWire =
            serde_json::from_str(line).map_err(|e| RecordError::Json(e.to_string()))?;
        let parts = wire
            .parts
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                Ok(PartAnnotation {
                    bbox: Aabb::from_array(p.bbox)
                        .map_err(|source| RecordError::InvalidBox { part: i, source })?,
                    q1: p.q1,
                    q2: p.q2,
                    q3_confident: matches!(p.q3, Q3Wire::Flag(true) | Q3Wire::Text(YesNo::Yes)),
                    new_description: p.new_description,
                })
            })
            .collect::<Result<Vec<_>, RecordError>>()?;
        let rec = ObjectRecord {
            id: wire.id,
            caption: wire.caption,
            parts,
            qa: wire.qa,
        };
        rec.validate()?;
        Ok(rec)
    }

    pub fn to_json(&self) -> String {
        let wire = RecordWire {
            id: self.id.clone(),
            caption: self.caption.clone(),
            parts: self
                .parts
                .iter()
                .map(|p| PartWire {
                    bbox: p.bbox.to_array(),
                    q1: p.q1.clone(),
                    q2: p.q2.clone(),
                    q3: Q3Wire::Text(if p.q3_confident {
                        YesNo::Yes
                    } else {
                        YesNo::No
                    }),
                    new_description: p.new_description.clone(),
                })
                .collect(),
            qa: self.qa.clone(),
        };
        serde_json::to_string(&wire).expect("records serialize")
    }

    pub fn validate(&self) -> Result<(), RecordError> {
        if self.id.trim().is_empty() {
            return Err(RecordError::EmptyId);
        }
        let reserved = |field: String, text: &str| {
            if text_is_reserved_free(text) {
                Ok(())
            } else {
                Err(RecordError::ReservedText { field })
            }
        };
        reserved("caption".into(), &self.caption)?;
        for (i, p) in self.parts.iter().enumerate() {
            if p.q1.trim().is_empty() {
                return Err(RecordError::EmptyField {
                    part: i,
                    field: "q1",
                });
            }
            if p.q2.trim().is_empty() {
                return Err(RecordError::EmptyField {
                    part: i,
                    field: "q2",
                });
            }
            reserved(format!("part {i} q1"), &p.q1)?;
            reserved(format!("part {i} q2"), &p.q2)?;
            if let Some(d) = &p.new_description {
                reserved(format!("part {i} new_description"), d)?;
            }
        }
        for (qi, pair) in self.qa.iter().enumerate() {
            for index in placeholder_indices(&pair.answer) {
                if index >= self.parts.len() {
                    return Err(RecordError::PlaceholderOutOfRange { qa: qi, index });
                }
            }
            reserved(format!("qa {qi} answer"), &pair.answer)?;
        }
        Ok(())
    }

    /// Non-fatal issues, currently over-long descriptions.
    pub fn warnings(&self) -> Vec<String> {
        self.parts
            .iter()
            .enumerate()
            .filter_map(|(i, p)| {
                let n = p.q2.split_whitespace().count();
                (n > MAX_Q2_WORDS).then(|| {
                    format!(
                        "{}: part {i} q2 has {n} words (limit {MAX_Q2_WORDS})",
                        self.id
                    )
                })
            })
            .collect()
    }
}

pub(crate) fn placeholder_regex() -> &'static regex::Regex {
    use std::sync::OnceLock;
    static RE: OnceLock<regex::Regex> = OnceLock::new();
    RE.get_or_init(|| regex::Regex::new(r"<Part_(\d+)>").expect("valid regex"))
}

/// Part indices referenced by `<Part_i>` placeholders, in order of appearance.
pub fn placeholder_indices(text: &str) -> Vec<usize> {
    placeholder_regex()
        .captures_iter(text)
        .map(|c| c[1].parse().unwrap_or(usize::MAX))
        .collect()
}
