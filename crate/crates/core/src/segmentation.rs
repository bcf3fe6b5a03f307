//! Face segmentation from decoded boxes and their token confidences.
//!
//! Each face is a candidate for every box that contains its centroid (closed
//! bounds). Among several candidates, boxes that strictly contain another
//! candidate drop out, and the most confident survivor wins; remaining ties go
//! to the smaller box, then the lower index.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::{Aabb, GrammarError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SegmentError {
    #[error("a box needs at least one token probability")]
    NoProbabilities,
    #[error("token probability {0} is outside [0, 1]")]
    BadProbability(f64),
    #[error("face {face} uses vertex {index}, but the mesh has {len} vertices")]
    VertexOutOfRange {
        face: usize,
        index: usize,
        len: usize,
    },
    #[error("line {line}: {message}")]
    Obj { line: usize, message: String },
    #[error("invalid box: {0}")]
    Box(#[from] GrammarError),
    #[error("candidate list {face} refers to box {index}, but there are {len} boxes")]
    CandidateOutOfRange {
        face: usize,
        index: usize,
        len: usize,
    },
    #[error("line {line}: {message}")]
    BoxLine { line: usize, message: String },
}

/// Arithmetic mean of a box's token probabilities.
pub fn box_confidence(token_probs: &[f64]) -> Result<f64, SegmentError> {
    if token_probs.is_empty() {
        return Err(SegmentError::NoProbabilities);
    }
    if let Some(&p) = token_probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(SegmentError::BadProbability(p));
    }
    Ok(token_probs.iter().sum::<f64>() / token_probs.len() as f64)
}

/// A decoded box with its confidence.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredBox {
    bbox: Aabb,
    confidence: f64,
    token_probs: Vec<f64>,
}

#[derive(Deserialize)]
struct ScoredBoxLine {
    #[serde(rename = "box")]
    bbox: [f64; 6],
    token_probs: Vec<f64>,
}

impl ScoredBox {
    pub fn new(bbox: Aabb, token_probs: Vec<f64>) -> Result<Self, SegmentError> {
        let confidence = box_confidence(&token_probs)?;
        Ok(Self {
            bbox,
            confidence,
            token_probs,
        })
    }

    /// Reads `{"box": [6 floats], "token_probs": [...]}` lines.
    pub fn read_jsonl(text: &str) -> Result<Vec<Self>, SegmentError> {
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                let wrap = |message: String| SegmentError::BoxLine {
                    line: i + 1,
                    message,
                };
                let raw: ScoredBoxLine =
                    serde_json::from_str(l).map_err(|e| wrap(e.to_string()))?;
                let bbox = Aabb::from_array(raw.bbox).map_err(|e| wrap(e.to_string()))?;
                Self::new(bbox, raw.token_probs).map_err(|e| wrap(e.to_string()))
            })
            .collect()
    }

    pub fn bbox(&self) -> &Aabb {
        &self.bbox
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    pub fn token_probs(&self) -> &[f64] {
        &self.token_probs
    }
}

/// Triangle mesh.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TriMesh {
    vertices: Vec<[f64; 3]>,
    faces: Vec<[usize; 3]>,
}

impl TriMesh {
    pub fn new(vertices: Vec<[f64; 3]>, faces: Vec<[usize; 3]>) -> Result<Self, SegmentError> {
        for (f, face) in faces.iter().enumerate() {
            if let Some(&index) = face.iter().find(|&&i| i >= vertices.len()) {
                return Err(SegmentError::VertexOutOfRange {
                    face: f,
                    index,
                    len: vertices.len(),
                });
            }
        }
        Ok(Self { vertices, faces })
    }

    /// Reads the `v x y z` and `f i j k` lines of an OBJ file (1-based
    /// indices; `i/t/n` forms use the vertex index). Every other line is
    /// ignored. Faces must be triangles.
    pub fn parse_obj(text: &str) -> Result<Self, SegmentError> {
        let mut vertices = Vec::new();
        let mut faces = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let err = |message: String| SegmentError::Obj {
                line: n + 1,
                message,
            };
            let mut fields = line.split_whitespace();
            match fields.next() {
                Some("v") => {
                    let xyz: Vec<f64> = fields
                        .take(3)
                        .map(|s| s.parse::<f64>().map_err(|e| err(format!("{s:?}: {e}"))))
                        .collect::<Result<_, _>>()?;
                    let [x, y, z] = xyz[..] else {
                        return Err(err("vertex needs three coordinates".into()));
                    };
                    vertices.push([x, y, z]);
                }
                Some("f") => {
                    let idx: Vec<usize> = fields
                        .map(|s| {
                            let head = s.split('/').next().unwrap_or(s);
                            match head.parse::<usize>() {
                                Ok(i) if i >= 1 => Ok(i - 1),
                                _ => Err(err(format!("bad vertex reference {s:?}"))),
                            }
                        })
                        .collect::<Result<_, _>>()?;
                    let [a, b, c] = idx[..] else {
                        return Err(err(format!("face has {} vertices, expected 3", idx.len())));
                    };
                    faces.push([a, b, c]);
                }
                _ => {}
            }
        }
        Self::new(vertices, faces)
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn centroid(&self, face: usize) -> [f64; 3] {
        let [a, b, c] = self.faces[face].map(|i| self.vertices[i]);
        std::array::from_fn(|k| (a[k] + b[k] + c[k]) / 3.0)
    }
}

/// Per face, the indices of the boxes containing its centroid.
pub fn face_candidates(mesh: &TriMesh, boxes: &[ScoredBox]) -> Vec<Vec<usize>> {
    (0..mesh.faces.len())
        .map(|f| {
            let c = mesh.centroid(f);
            boxes
                .iter()
                .enumerate()
                .filter(|(_, b)| b.bbox.contains_point(c))
                .map(|(j, _)| j)
                .collect()
        })
        .collect()
}

/// Per-face labels; `None` marks faces outside every box.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FaceAssignment {
    pub labels: Vec<Option<usize>>,
}

impl FaceAssignment {
    /// Faces per box, plus the unassigned count.
    pub fn face_counts(&self, num_boxes: usize) -> (Vec<usize>, usize) {
        let mut counts = vec![0; num_boxes];
        let mut unassigned = 0;
        for l in &self.labels {
            match l {
                Some(j) => counts[*j] += 1,
                None => unassigned += 1,
            }
        }
        (counts, unassigned)
    }
}

/// `inner` lies inside `outer` and the two differ.
pub fn strictly_contains(outer: &Aabb, inner: &Aabb) -> bool {
    outer.contains_box(inner) && outer != inner
}

/// Picks one box among a face's candidates.
pub fn resolve_face(candidates: &[usize], boxes: &[ScoredBox]) -> Option<usize> {
    // Containment: drop every candidate that strictly contains another.
    let survivors = candidates.iter().copied().filter(|&j| {
        !candidates
            .iter()
            .any(|&i| i != j && strictly_contains(&boxes[j].bbox, &boxes[i].bbox))
    });
    // Confidence, then smaller volume, then lower index.
    survivors.min_by(|&a, &b| {
        let (ba, bb) = (&boxes[a], &boxes[b]);
        bb.confidence
            .total_cmp(&ba.confidence)
            .then(ba.bbox.volume().total_cmp(&bb.bbox.volume()))
            .then(a.cmp(&b))
    })
}

pub fn resolve_assignments(
    candidates: &[Vec<usize>],
    boxes: &[ScoredBox],
) -> Result<FaceAssignment, SegmentError> {
    for (face, list) in candidates.iter().enumerate() {
        if let Some(&index) = list.iter().find(|&&j| j >= boxes.len()) {
            return Err(SegmentError::CandidateOutOfRange {
                face,
                index,
                len: boxes.len(),
            });
        }
    }
    Ok(FaceAssignment {
        labels: candidates.iter().map(|c| resolve_face(c, boxes)).collect(),
    })
}

pub fn segment_mesh(mesh: &TriMesh, boxes: &[ScoredBox]) -> Result<FaceAssignment, SegmentError> {
    resolve_assignments(&face_candidates(mesh, boxes), boxes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sb(min: [f64; 3], max: [f64; 3], conf: f64) -> ScoredBox {
        ScoredBox::new(Aabb::new(min, max).unwrap(), vec![conf; 6]).unwrap()
    }

    #[test]
    fn confidence_is_mean() {
        assert_eq!(box_confidence(&[1.0; 6]).unwrap(), 1.0);
        assert_eq!(box_confidence(&[0.0; 6]).unwrap(), 0.0);
        let c = box_confidence(&[0.9, 0.8, 0.7, 0.6, 0.5, 0.4]).unwrap();
        assert!((c - 0.65).abs() < 1e-12);
        assert_eq!(box_confidence(&[]), Err(SegmentError::NoProbabilities));
        assert_eq!(
            box_confidence(&[1.5]),
            Err(SegmentError::BadProbability(1.5))
        );
    }

    fn single_face(c: [f64; 3]) -> TriMesh {
        // Three vertices whose mean is exactly c.
        TriMesh::new(
            vec![[c[0] - 0.5, c[1], c[2]], [c[0] + 0.5, c[1], c[2]], c],
            vec![[0, 1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn candidates_use_closed_bounds() {
        let full = sb([-1.0; 3], [1.0; 3], 0.5);
        assert_eq!(
            face_candidates(&single_face([0.0; 3]), std::slice::from_ref(&full)),
            vec![vec![0]]
        );
        let half = sb([0.0, -1.0, -1.0], [1.0; 3], 0.5);
        assert_eq!(
            face_candidates(&single_face([0.0; 3]), &[half]),
            vec![vec![0]]
        );
        let far = sb([0.5; 3], [1.0; 3], 0.5);
        assert_eq!(
            face_candidates(&single_face([0.0; 3]), &[far]),
            vec![Vec::<usize>::new()]
        );
    }

    #[test]
    fn containment_beats_confidence() {
        let inner = sb([-0.5; 3], [0.5; 3], 0.1);
        let outer = sb([-1.0; 3], [1.0; 3], 0.99);
        assert_eq!(
            resolve_face(&[0, 1], &[inner.clone(), outer.clone()]),
            Some(0)
        );
        assert_eq!(resolve_face(&[0, 1], &[outer, inner]), Some(1));
    }

    #[test]
    fn confidence_for_overlaps() {
        let a = sb([-1.0; 3], [0.5; 3], 0.9);
        let b = sb([-0.5; 3], [1.0; 3], 0.4);
        assert_eq!(resolve_face(&[0, 1], &[a.clone(), b.clone()]), Some(0));
        assert_eq!(resolve_face(&[0, 1], &[b, a]), Some(1));
    }

    #[test]
    fn equal_boxes_fall_to_lower_index() {
        let a = sb([-1.0; 3], [0.5; 3], 0.7);
        assert_eq!(resolve_face(&[1, 0], &[a.clone(), a]), Some(0));
        // Equal confidence, different volume: smaller wins.
        let small = sb([-0.5, -0.5, -0.5], [0.6, 0.5, 0.5], 0.7);
        let big = sb([-0.6, -0.6, -0.6], [0.5, 0.7, 0.7], 0.7);
        assert_eq!(resolve_face(&[0, 1], &[big, small]), Some(1));
    }

    #[test]
    fn empty_and_full_box_lists() {
        let mesh = single_face([0.1, 0.2, 0.3]);
        assert_eq!(segment_mesh(&mesh, &[]).unwrap().labels, vec![None]);
        let full = sb([-1.0; 3], [1.0; 3], 0.2);
        assert_eq!(segment_mesh(&mesh, &[full]).unwrap().labels, vec![Some(0)]);
        assert!(resolve_assignments(&[vec![3]], &[]).is_err());
    }

    #[test]
    fn obj_subset() {
        let obj = "# comment\nv 0 0 0\nv 1 0 0\nvn 0 0 1\nv 0 1 0\nf 1/1/1 2//1 3\ng x\n";
        let m = TriMesh::parse_obj(obj).unwrap();
        assert_eq!(m.faces(), &[[0, 1, 2]]);
        assert!(TriMesh::parse_obj("v 0 0 0\nf 1 2 3\n").is_err());
        assert!(TriMesh::parse_obj("v 0 0 0\nv 0 0 0\nv 0 0 0\nv 0 0 0\nf 1 2 3 4\n").is_err());
        assert!(TriMesh::parse_obj("v 0 0\n").is_err());
        assert!(TriMesh::parse_obj("v 0 0 0\nf 0 1 1\n").is_err());
    }

    #[test]
    fn reads_scored_boxes() {
        let text = "{\"box\":[-1,-1,-1,1,1,1],\"token_probs\":[0.5,1]}\n";
        let b = ScoredBox::read_jsonl(text).unwrap();
        assert_eq!(b[0].confidence(), 0.75);
        assert!(ScoredBox::read_jsonl("{\"box\":[1,1,1,0,0,0],\"token_probs\":[1]}").is_err());
    }
}
