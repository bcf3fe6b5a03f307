use partgram::segmentation::{segment_mesh, ScoredBox, TriMesh};
use serde::Serialize;

use crate::args::SegmentArgs;
use crate::failure::{emit, read_file, to_json, CliResult, Failure};

#[derive(Serialize)]
struct SegmentParams {
    mesh: String,
    boxes: String,
}

#[derive(Serialize)]
struct BoxSummary {
    confidence: f64,
    faces: usize,
}

#[derive(Serialize)]
struct SegmentReport {
    params: SegmentParams,
    faces: usize,
    labels: Vec<Option<usize>>,
    face_counts: Vec<usize>,
    unassigned: usize,
    boxes: Vec<BoxSummary>,
}

pub fn run(args: &SegmentArgs) -> CliResult {
    let mesh = TriMesh::parse_obj(&read_file(&args.mesh)?)
        .map_err(|e| Failure::domain(format!("{}: {e}", args.mesh.display())))?;
    let boxes = ScoredBox::read_jsonl(&read_file(&args.boxes)?)
        .map_err(|e| Failure::domain(format!("{}: {e}", args.boxes.display())))?;
    let assignment = segment_mesh(&mesh, &boxes).map_err(Failure::domain)?;
    let (face_counts, unassigned) = assignment.face_counts(boxes.len());
    let report = SegmentReport {
        params: SegmentParams {
            mesh: args.mesh.display().to_string(),
            boxes: args.boxes.display().to_string(),
        },
        faces: mesh.faces().len(),
        boxes: boxes
            .iter()
            .zip(&face_counts)
            .map(|(b, &faces)| BoxSummary {
                confidence: b.confidence(),
                faces,
            })
            .collect(),
        labels: assignment.labels,
        face_counts,
        unassigned,
    };
    emit(args.output.as_deref(), &to_json(&report))
}
