use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::boxes::{match_and_score, Matching};
use super::text::{bleu1, embedding_cosine, meteor_lite, rouge_l, TextError};
use super::voxel::{voxel_iou, voxel_recall, voxelize, VoxelError};
use crate::builder::{InstructionSample, TaskType};
use crate::clustering::EmbeddingTable;
use crate::grammar::{lex, parse_program, Aabb, GrammarError, ParseError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("record {id}: invalid box: {source}")]
    Box { id: String, source: GrammarError },
    #[error("duplicate {side} id {id:?}")]
    DuplicateId { side: &'static str, id: String },
    #[error("record {id}: prediction is {pred}, ground truth is {gt}")]
    TaskMismatch {
        id: String,
        gt: TaskType,
        pred: TaskType,
    },
    #[error("sample {index} ({object}): target does not parse: {source}")]
    Target {
        index: usize,
        object: String,
        source: ParseError,
    },
    #[error("record {id}: {source}")]
    Text { id: String, source: TextError },
    #[error(transparent)]
    Voxel(#[from] VoxelError),
}

/// One ground-truth or predicted item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub id: String,
    pub task_type: TaskType,
    #[serde(default)]
    pub boxes: Vec<[f64; 6]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

impl EvalRecord {
    pub fn read_jsonl(text: &str) -> Result<Vec<Self>, EvalError> {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let r: Self = serde_json::from_str(line).map_err(|e| EvalError::Line {
                line: i + 1,
                message: e.to_string(),
            })?;
            r.aabbs()?;
            out.push(r);
        }
        Ok(out)
    }

    pub fn aabbs(&self) -> Result<Vec<Aabb>, EvalError> {
        self.boxes
            .iter()
            .map(|b| {
                Aabb::from_array(*b).map_err(|source| EvalError::Box {
                    id: self.id.clone(),
                    source,
                })
            })
            .collect()
    }

    /// Text, if it has at least one token.
    pub fn text_present(&self) -> Option<&str> {
        self.text
            .as_deref()
            .filter(|t| t.chars().any(char::is_alphanumeric))
    }
}

/// Evaluation records from training samples: boxes in target order
/// (dequantized) and the target's words. Ids take the form
/// `object/T<n>/<k>`, with `k` counting that object's samples of that type.
pub fn records_from_samples(samples: &[InstructionSample]) -> Result<Vec<EvalRecord>, EvalError> {
    let mut seen: HashMap<(&str, TaskType), usize> = HashMap::new();
    samples
        .iter()
        .enumerate()
        .map(|(index, s)| {
            let program = parse_program(&lex(&s.target)).map_err(|source| EvalError::Target {
                index,
                object: s.object_id.clone(),
                source,
            })?;
            let k = seen.entry((&s.object_id, s.task_type)).or_default();
            let id = format!("{}/{}/{}", s.object_id, s.task_type, k);
            *k += 1;
            let text = program.text();
            Ok(EvalRecord {
                id,
                task_type: s.task_type,
                boxes: program
                    .boxes()
                    .iter()
                    .map(|b| b.to_aabb().to_array())
                    .collect(),
                text: (!text.is_empty()).then_some(text),
            })
        })
        .collect()
}

/// Column groups of the per-task table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modality {
    Boxes,
    Text,
}

impl Modality {
    /// Whether the per-task table reports this modality for `task`. Box lists
    /// are scored everywhere except the box-to-text tasks; text only where the
    /// target carries a description or answer of its own, which leaves out
    /// pure listings, box-only grounding, removal and replacement programs.
    pub fn reported(self, task: TaskType) -> bool {
        use TaskType::*;
        match self {
            Modality::Boxes => !matches!(task, BoxToName | BoxToDescription),
            Modality::Text => matches!(
                task,
                MultiPartCoarse
                    | MultiPartFine
                    | SinglePartFromName
                    | BoxToName
                    | BoxToDescription
                    | PartQa
                    | Add
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalConfig {
    pub voxel_res: usize,
    pub matching: Matching,
    /// Where the embedding table came from, echoed into the report.
    pub embedding_source: Option<String>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            voxel_res: super::voxel::DEFAULT_VOXEL_RES,
            matching: Matching::default(),
            embedding_source: None,
        }
    }
}

/// One row of the per-task table; `None` marks a blank cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskRow {
    pub task: TaskType,
    #[serde(rename = "type")]
    pub label: String,
    pub name: &'static str,
    pub count: usize,
    pub iou: Option<f64>,
    pub embedding_cosine: Option<f64>,
    pub bleu1: Option<f64>,
    pub rouge_l: Option<f64>,
    pub meteor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverallScores {
    pub bbox_iou: Option<f64>,
    pub voxel_recall: Option<f64>,
    pub voxel_iou: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub config: EvalConfig,
    pub records: usize,
    /// Ground-truth records with no prediction; they score 0.
    pub missing_predictions: usize,
    /// Predictions whose id is not in the ground truth; ignored.
    pub unmatched_predictions: usize,
    pub overall: OverallScores,
    pub tasks: Vec<TaskRow>,
}

#[derive(Default)]
struct Mean {
    sum: f64,
    n: usize,
}

impl Mean {
    fn add(&mut self, v: f64) {
        self.sum += v;
        self.n += 1;
    }

    fn get(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum / self.n as f64)
    }
}

#[derive(Default)]
struct TaskAcc {
    count: usize,
    iou: Mean,
    cosine: Mean,
    bleu1: Mean,
    rouge_l: Mean,
    meteor: Mean,
}

fn index_by_id<'a>(
    records: &'a [EvalRecord],
    side: &'static str,
) -> Result<HashMap<&'a str, &'a EvalRecord>, EvalError> {
    let mut map = HashMap::new();
    for r in records {
        if map.insert(r.id.as_str(), r).is_some() {
            return Err(EvalError::DuplicateId {
                side,
                id: r.id.clone(),
            });
        }
    }
    Ok(map)
}

/// Scores predictions against ground truth, pairing records by id.
///
/// Text scores use an empty candidate when the prediction has no text, so a
/// missing answer scores 0 on every text column. Sums run in ground-truth
/// order.
pub fn evaluate(
    gt: &[EvalRecord],
    pred: &[EvalRecord],
    config: &EvalConfig,
    embeddings: Option<&EmbeddingTable>,
) -> Result<MetricReport, EvalError> {
    index_by_id(gt, "ground-truth")?;
    let preds = index_by_id(pred, "prediction")?;
    let gt_ids: HashSet<&str> = gt.iter().map(|r| r.id.as_str()).collect();

    let mut tasks: Vec<TaskAcc> = TaskType::ALL.iter().map(|_| TaskAcc::default()).collect();
    let (mut bbox, mut vrec, mut viou) = (Mean::default(), Mean::default(), Mean::default());
    let mut missing = 0;

    for g in gt {
        let p = preds.get(g.id.as_str()).copied();
        if let Some(p) = p.filter(|p| p.task_type != g.task_type) {
            return Err(EvalError::TaskMismatch {
                id: g.id.clone(),
                gt: g.task_type,
                pred: p.task_type,
            });
        }
        missing += usize::from(p.is_none());
        let acc = &mut tasks[g.task_type.index()];
        acc.count += 1;

        let gt_boxes = g.aabbs()?;
        if Modality::Boxes.reported(g.task_type) && !gt_boxes.is_empty() {
            let pred_boxes = match p {
                Some(p) => p.aabbs()?,
                None => Vec::new(),
            };
            let score = match_and_score(&gt_boxes, &pred_boxes, config.matching).unwrap_or(0.0);
            acc.iou.add(score);
            bbox.add(score);
            let gv = voxelize(&gt_boxes, config.voxel_res)?;
            let pv = voxelize(&pred_boxes, config.voxel_res)?;
            vrec.add(voxel_recall(&gv, &pv)?);
            viou.add(voxel_iou(&gv, &pv)?);
        }

        if let Some(reference) = g
            .text_present()
            .filter(|_| Modality::Text.reported(g.task_type))
        {
            let candidate = p.and_then(EvalRecord::text_present).unwrap_or("");
            let wrap = |source| EvalError::Text {
                id: g.id.clone(),
                source,
            };
            acc.bleu1.add(bleu1(candidate, reference).map_err(wrap)?);
            acc.rouge_l
                .add(rouge_l(candidate, reference).map_err(wrap)?);
            acc.meteor
                .add(meteor_lite(candidate, reference).map_err(wrap)?);
            if let Some(table) = embeddings {
                let v = if candidate.is_empty() {
                    0.0
                } else {
                    embedding_cosine(candidate, reference, table).map_err(wrap)?
                };
                acc.cosine.add(v);
            }
        }
    }

    let rows = TaskType::ALL
        .iter()
        .zip(&tasks)
        .map(|(&task, acc)| TaskRow {
            task,
            label: task.to_string(),
            name: task.name(),
            count: acc.count,
            iou: acc.iou.get(),
            embedding_cosine: acc.cosine.get(),
            bleu1: acc.bleu1.get(),
            rouge_l: acc.rouge_l.get(),
            meteor: acc.meteor.get(),
        })
        .collect();

    Ok(MetricReport {
        config: config.clone(),
        records: gt.len(),
        missing_predictions: missing,
        unmatched_predictions: pred
            .iter()
            .filter(|p| !gt_ids.contains(p.id.as_str()))
            .count(),
        overall: OverallScores {
            bbox_iou: bbox.get(),
            voxel_recall: vrec.get(),
            voxel_iou: viou.get(),
        },
        tasks: rows,
    })
}
