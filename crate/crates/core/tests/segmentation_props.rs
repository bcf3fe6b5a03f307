use partgram::grammar::Aabb;
use partgram::segmentation::{
    box_confidence, face_candidates, resolve_face, segment_mesh, strictly_contains, ScoredBox,
    TriMesh,
};
use partgram::synth;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CUBE: &str = include_str!("fixtures/cube.obj");
const CUBE_BOXES: &str = include_str!("fixtures/cube_boxes.jsonl");

fn scored(b: Aabb, conf: f64) -> ScoredBox {
    ScoredBox::new(b, vec![conf]).unwrap()
}

fn random_boxes(seed: u64) -> Vec<ScoredBox> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=6);
    let mut boxes: Vec<ScoredBox> = Vec::new();
    for _ in 0..n {
        // Half the time, nest inside an earlier box.
        let b = match boxes.last() {
            Some(outer) if rng.random_bool(0.5) => {
                let (lo, hi) = (outer.bbox().min(), outer.bbox().max());
                let mut min = [0.0; 3];
                let mut max = [0.0; 3];
                for a in 0..3 {
                    let (x, y) = (
                        rng.random_range(lo[a]..=hi[a]),
                        rng.random_range(lo[a]..=hi[a]),
                    );
                    min[a] = x.min(y);
                    max[a] = x.max(y);
                }
                Aabb::new(min, max).unwrap()
            }
            _ => synth::aabb(&mut rng),
        };
        let conf = f64::from(rng.random_range(0..=10u8)) / 10.0;
        boxes.push(scored(b, conf));
    }
    boxes
}

fn comparable(a: &ScoredBox, b: &ScoredBox) -> bool {
    a.bbox().contains_box(b.bbox()) || b.bbox().contains_box(a.bbox())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn nested_candidate_never_loses_to_its_container(seed in any::<u64>()) {
        let boxes = random_boxes(seed);
        let cands: Vec<usize> = (0..boxes.len()).collect();
        let w = resolve_face(&cands, &boxes).unwrap();
        for &i in &cands {
            prop_assert!(!strictly_contains(boxes[w].bbox(), boxes[i].bbox()));
        }
    }

    #[test]
    fn confidence_decides_among_incomparable_boxes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Disjoint slabs along x are pairwise incomparable.
        let n = rng.random_range(2..=5);
        let confs: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..0.9)).collect();
        let width = 2.0 / n as f64;
        let boxes: Vec<ScoredBox> = (0..n)
            .map(|i| {
                let x0 = -1.0 + width * i as f64;
                let b = Aabb::new([x0, -1.0, -1.0], [x0 + width * 0.5, 1.0, 1.0]).unwrap();
                scored(b, confs[i])
            })
            .collect();
        for i in 0..n {
            for j in 0..n {
                prop_assert!(i == j || !comparable(&boxes[i], &boxes[j]));
            }
        }
        let cands: Vec<usize> = (0..n).collect();
        let w = resolve_face(&cands, &boxes).unwrap();
        let mut raised = boxes.clone();
        raised[w] = scored(*boxes[w].bbox(), (confs[w] + 0.05).min(1.0));
        prop_assert_eq!(resolve_face(&cands, &raised), Some(w));
        let loser = (w + 1) % n;
        let mut flipped = boxes.clone();
        flipped[loser] = scored(*boxes[loser].bbox(), confs[w] + 0.05);
        prop_assert_eq!(resolve_face(&cands, &flipped), Some(loser));
    }

    #[test]
    fn unassigned_iff_no_candidate(seed in any::<u64>()) {
        let boxes = random_boxes(seed);
        let mesh = TriMesh::parse_obj(CUBE).unwrap();
        let cands = face_candidates(&mesh, &boxes);
        let labels = segment_mesh(&mesh, &boxes).unwrap().labels;
        for (c, l) in cands.iter().zip(&labels) {
            prop_assert_eq!(c.is_empty(), l.is_none());
            if let Some(l) = l {
                prop_assert!(c.contains(l));
            }
        }
    }

    #[test]
    fn confidence_is_order_free_and_bounded(probs in prop::collection::vec(0.0f64..=1.0, 1..12)) {
        let c = box_confidence(&probs).unwrap();
        let mut rev = probs.clone();
        rev.reverse();
        prop_assert!((box_confidence(&rev).unwrap() - c).abs() <= 1e-12);
        let lo = probs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = probs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo - 1e-12 <= c && c <= hi + 1e-12);
    }
}

#[test]
fn cube_faces_split_by_centroid_sign() {
    let mesh = TriMesh::parse_obj(CUBE).unwrap();
    assert_eq!(mesh.faces().len(), 12);
    let boxes = ScoredBox::read_jsonl(CUBE_BOXES).unwrap();
    let labels = segment_mesh(&mesh, &boxes).unwrap().labels;
    for (f, face) in mesh.faces().iter().enumerate() {
        let x: f64 = face.iter().map(|&v| mesh.vertices()[v][0]).sum::<f64>() / 3.0;
        assert_ne!(x, 0.0);
        let expected = if x < 0.0 { 0 } else { 1 };
        assert_eq!(labels[f], Some(expected), "face {f}");
    }
    let counts: Vec<usize> = (0..2)
        .map(|b| labels.iter().filter(|l| **l == Some(b)).count())
        .collect();
    assert_eq!(counts, [6, 6]);
}
