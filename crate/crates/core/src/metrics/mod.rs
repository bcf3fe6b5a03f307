//! Evaluation: box matching IoU, voxel overlap and lexical text scores.

mod boxes;
mod report;
mod text;
mod voxel;

pub use boxes::{iou, match_and_score, Matching};
pub use report::{
    evaluate, records_from_samples, EvalConfig, EvalError, EvalRecord, MetricReport, Modality,
    OverallScores, TaskRow,
};
pub use text::{bleu1, embedding_cosine, meteor_lite, rouge_l, tokenize, TextError};
pub use voxel::{voxel_iou, voxel_recall, voxelize, VoxelError, VoxelGrid, DEFAULT_VOXEL_RES};
