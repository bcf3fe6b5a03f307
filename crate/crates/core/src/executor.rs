//! Reference execution of edit programs on labeled point sets.
//!
//! Edit boxes act as cuboid masks over dequantized, closed bounds. Deletion
//! and modification remove the masked points; addition and modification leave
//! a pending region for a generative backend to fill. Points outside every
//! mask are carried over unchanged and in their original order.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::{Aabb, PlanProgram, QuantBox, Statement, COORD_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("point {index} lies outside the normalized cube")]
    OutOfCube { index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenePoint {
    pub pos: [f64; 3],
    pub label: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    Added,
    Modified,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PendingRegion {
    #[serde(rename = "box", serialize_with = "box_as_array")]
    pub bbox: Aabb,
    pub kind: RegionKind,
    pub text: String,
}

fn box_as_array<S: serde::Serializer>(b: &Aabb, s: S) -> Result<S::Ok, S::Error> {
    b.to_array().serialize(s)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointScene {
    pub points: Vec<ScenePoint>,
    pub regions: Vec<PendingRegion>,
}

impl PointScene {
    pub fn new(points: Vec<ScenePoint>) -> Result<Self, SceneError> {
        let limit = 1.0 + COORD_TOLERANCE;
        if let Some(index) = points
            .iter()
            .position(|p| p.pos.iter().any(|c| !(c.abs() <= limit)))
        {
            return Err(SceneError::OutOfCube { index });
        }
        Ok(Self {
            points,
            regions: Vec::new(),
        })
    }

    /// Reads `{"pos": [x, y, z], "label": n}` lines; blank lines are skipped.
    pub fn read_jsonl(text: &str) -> Result<Self, SceneError> {
        let mut points = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let p: ScenePoint = serde_json::from_str(line).map_err(|e| SceneError::Line {
                line: i + 1,
                message: e.to_string(),
            })?;
            points.push(p);
        }
        Self::new(points)
    }

    pub fn points_jsonl(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            out.push_str(&serde_json::to_string(p).expect("points serialize"));
            out.push('\n');
        }
        out
    }
}

/// One cuboid mask with its instruction, in the form an external
/// box-conditioned editor consumes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CuboidMask {
    pub op: &'static str,
    #[serde(rename = "box", serialize_with = "box_as_array")]
    pub bbox: Aabb,
    pub text: String,
}

/// Masks for every edit statement, in program order. Non-edit statements
/// contribute nothing.
pub fn cuboid_masks(program: &PlanProgram) -> Vec<CuboidMask> {
    let mask = |op, b: &QuantBox, text: &str| CuboidMask {
        op,
        bbox: b.to_aabb(),
        text: text.to_string(),
    };
    let mut out = Vec::new();
    for s in &program.statements {
        match s {
            Statement::EditAdd(b, t) => out.push(mask("add", b, t)),
            Statement::EditModify(b, t) => out.push(mask("modify", b, t)),
            Statement::EditDelete(bs) => out.extend(bs.iter().map(|b| mask("delete", b, ""))),
            _ => {}
        }
    }
    out
}

fn remove_inside(points: &mut Vec<ScenePoint>, boxes: &[Aabb]) {
    points.retain(|p| !boxes.iter().any(|b| b.contains_point(p.pos)));
}

/// Applies one statement in place.
pub fn apply_statement(scene: &mut PointScene, statement: &Statement) {
    match statement {
        Statement::EditDelete(bs) => {
            let boxes: Vec<Aabb> = bs.iter().map(QuantBox::to_aabb).collect();
            remove_inside(&mut scene.points, &boxes);
        }
        Statement::EditModify(b, text) => {
            let bbox = b.to_aabb();
            remove_inside(&mut scene.points, &[bbox]);
            scene.regions.push(PendingRegion {
                bbox,
                kind: RegionKind::Modified,
                text: text.clone(),
            });
        }
        Statement::EditAdd(b, text) => scene.regions.push(PendingRegion {
            bbox: b.to_aabb(),
            kind: RegionKind::Added,
            text: text.clone(),
        }),
        other => log::warn!("ignoring non-edit statement {other:?}"),
    }
}

pub fn execute_program(scene: &PointScene, program: &PlanProgram) -> PointScene {
    let mut out = scene.clone();
    for s in &program.statements {
        apply_statement(&mut out, s);
    }
    out
}

/// Dequantized boxes of every edit statement.
pub fn edit_boxes(program: &PlanProgram) -> Vec<Aabb> {
    program
        .statements
        .iter()
        .filter(|s| s.is_edit())
        .flat_map(|s| s.boxes())
        .map(|b| b.to_aabb())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SceneDiff {
    /// Indices into `before` of points missing from `after`.
    pub removed: Vec<usize>,
    /// Indices into `after` of points absent from `before`.
    pub added_points: Vec<usize>,
    /// Regions of `after` beyond those already in `before`.
    pub added_regions: Vec<PendingRegion>,
    pub untouched: usize,
}

impl SceneDiff {
    pub fn is_empty(&self) -> bool {
        self.removed.is_empty() && self.added_points.is_empty() && self.added_regions.is_empty()
    }
}

fn same_point(a: &ScenePoint, b: &ScenePoint) -> bool {
    a.label == b.label
        && a.pos
            .iter()
            .zip(&b.pos)
            .all(|(x, y)| x.to_bits() == y.to_bits())
}

/// Compares two scenes point by point, bit-exactly.
///
/// Points are walked in order; a point of `before` that does not match the
/// next unmatched point of `after` counts as removed. When `after` keeps the
/// order of `before` (as execution does), the report is exact.
pub fn diff_scenes(before: &PointScene, after: &PointScene) -> SceneDiff {
    let mut diff = SceneDiff::default();
    let mut j = 0;
    for (i, p) in before.points.iter().enumerate() {
        if j < after.points.len() && same_point(p, &after.points[j]) {
            diff.untouched += 1;
            j += 1;
        } else {
            diff.removed.push(i);
        }
    }
    diff.added_points = (j..after.points.len()).collect();
    let shared = before
        .regions
        .iter()
        .zip(&after.regions)
        .take_while(|(a, b)| a == b)
        .count();
    diff.added_regions = after.regions[shared..].to_vec();
    diff
}
