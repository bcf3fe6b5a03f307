//! Seeded random fixtures: programs, annotated objects and point scenes.
//!
//! Every generator draws only from the supplied RNG, so a fixed seed gives a
//! fixed fixture.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::builder::{ObjectRecord, PartAnnotation, QaPair};
use crate::executor::{PointScene, ScenePoint};
use crate::grammar::{dequantize_coord, Aabb, PlanProgram, QuantBox, Segment, Statement, NUM_BINS};

const WORDS: &[&str] = &[
    "a",
    "the",
    "leg",
    "legs",
    "seat",
    "back",
    "wheel",
    "wooden",
    "round",
    "tall",
    "handle",
    "door",
    "wing",
    "head",
    "red",
    "metal",
    "with",
    "and",
    "of",
    "4",
    "x2",
    "don't",
    "left,",
    "(front)",
    "<box",
    "boxs>",
    "<coord_>",
    "<coord_x>",
    "<Part_1>",
    "coord_5",
    "é",
    "日本",
];

const NAMES: &[&str] = &[
    "leg",
    "seat",
    "backrest",
    "armrest",
    "wheel",
    "door",
    "handle",
    "wing",
    "head",
    "tail",
    "lid",
    "base",
    "frame",
    "cushion",
    "table leg",
    "front wheel",
];

const ADJECTIVES: &[&str] = &[
    "wooden", "metal", "round", "square", "tall", "short", "curved", "padded", "black", "white",
    "thin", "thick", "glossy", "carved",
];

pub fn quant_box<R: Rng + ?Sized>(rng: &mut R) -> QuantBox {
    let mut bins = [0u32; 6];
    for a in 0..3 {
        let (x, y) = (rng.random_range(0..NUM_BINS), rng.random_range(0..NUM_BINS));
        bins[a] = x.min(y);
        bins[a + 3] = x.max(y);
    }
    QuantBox::new(bins).expect("ordered bins are valid")
}

/// Box with arbitrary float corners.
pub fn aabb<R: Rng + ?Sized>(rng: &mut R) -> Aabb {
    let mut min = [0.0; 3];
    let mut max = [0.0; 3];
    for a in 0..3 {
        let (x, y): (f64, f64) = (rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
        min[a] = x.min(y);
        max[a] = x.max(y);
    }
    Aabb::new(min, max).expect("ordered corners in range")
}

/// One to `max_words` words joined by single spaces.
pub fn text<R: Rng + ?Sized>(rng: &mut R, max_words: usize) -> String {
    let n = rng.random_range(1..=max_words.max(1));
    (0..n)
        .map(|_| *WORDS.choose(rng).expect("non-empty"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn edit_text<R: Rng + ?Sized>(rng: &mut R) -> String {
    if rng.random_bool(0.2) {
        String::new()
    } else {
        text(rng, 4)
    }
}

fn edit<R: Rng + ?Sized>(rng: &mut R) -> Statement {
    match rng.random_range(0..3) {
        0 => Statement::EditAdd(quant_box(rng), edit_text(rng)),
        1 => Statement::EditDelete(
            (0..rng.random_range(1..=3))
                .map(|_| quant_box(rng))
                .collect(),
        ),
        _ => Statement::EditModify(quant_box(rng), edit_text(rng)),
    }
}

fn run<R: Rng + ?Sized>(rng: &mut R, out: &mut Vec<Statement>) {
    match rng.random_range(0..3) {
        0 => out.push(Statement::OverallText(text(rng, 6))),
        1 => {
            for _ in 0..rng.random_range(1..=3) {
                let b = quant_box(rng);
                out.push(if rng.random_bool(0.5) {
                    Statement::BoxOnly(b)
                } else {
                    Statement::BoxWithText(b, text(rng, 4))
                });
            }
        }
        _ => {
            let mut segs = vec![Segment::Text(text(rng, 4))];
            for _ in 0..rng.random_range(1..=3) {
                segs.push(Segment::Box(quant_box(rng)));
                if rng.random_bool(0.6) {
                    segs.push(Segment::Text(text(rng, 3)));
                }
            }
            out.push(Statement::GroundedText(segs));
        }
    }
}

/// A program that passes [`PlanProgram::validate`], with up to
/// `max_blocks` edits and statement runs.
pub fn program<R: Rng + ?Sized>(rng: &mut R, max_blocks: usize) -> PlanProgram {
    let mut statements = Vec::new();
    let mut last_was_run = false;
    for _ in 0..rng.random_range(0..=max_blocks) {
        if !last_was_run && rng.random_bool(0.5) {
            run(rng, &mut statements);
            last_was_run = true;
        } else {
            statements.push(edit(rng));
            last_was_run = false;
        }
    }
    PlanProgram::new(statements)
}

/// Program made only of edit statements.
pub fn edit_program<R: Rng + ?Sized>(rng: &mut R, max_edits: usize) -> PlanProgram {
    PlanProgram::new(
        (0..rng.random_range(1..=max_edits.max(1)))
            .map(|_| edit(rng))
            .collect(),
    )
}

fn description<R: Rng + ?Sized>(rng: &mut R, name: &str) -> String {
    let adj = ADJECTIVES.choose(rng).expect("non-empty");
    let adj2 = ADJECTIVES.choose(rng).expect("non-empty");
    format!("a {adj} {adj2} {name}")
}

/// An annotated object with one to `max_parts` parts and up to three QA
/// pairs whose answers reference parts through `<Part_i>`.
pub fn object_record<R: Rng + ?Sized>(rng: &mut R, id: &str, max_parts: usize) -> ObjectRecord {
    let n = rng.random_range(1..=max_parts.max(1));
    let parts: Vec<PartAnnotation> = (0..n)
        .map(|_| {
            let q1 = NAMES.choose(rng).expect("non-empty").to_string();
            let q2 = description(rng, &q1);
            PartAnnotation {
                bbox: aabb(rng),
                new_description: rng.random_bool(0.3).then(|| description(rng, &q1)),
                q1,
                q2,
                q3_confident: rng.random_bool(0.8),
            }
        })
        .collect();
    let qa = (0..rng.random_range(0..=3))
        .map(|k| {
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            QaPair {
                question: format!("where is part {k} of the object?"),
                answer: format!("The {} <Part_{i}> is near <Part_{j}>.", parts[i].q1),
            }
        })
        .collect();
    ObjectRecord {
        id: id.to_string(),
        caption: format!("a {} object", ADJECTIVES.choose(rng).expect("non-empty")),
        parts,
        qa,
    }
}

/// Coordinate that is either uniform or exactly on a quantization bin.
fn scene_coord<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.random_bool(0.3) {
        dequantize_coord(rng.random_range(0..NUM_BINS)).expect("bin in range")
    } else {
        rng.random_range(-1.0..=1.0)
    }
}

/// `n` labeled points; about a third of the coordinates sit exactly on bin
/// values so that box boundaries are exercised.
pub fn scene<R: Rng + ?Sized>(rng: &mut R, n: usize) -> PointScene {
    let points = (0..n)
        .map(|_| ScenePoint {
            pos: [scene_coord(rng), scene_coord(rng), scene_coord(rng)],
            label: rng.random_range(0..8),
        })
        .collect();
    PointScene::new(points).expect("points in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_fixtures_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..200 {
            program(&mut rng, 6).validate().unwrap();
            object_record(&mut rng, &format!("o{i}"), 6)
                .validate()
                .unwrap();
        }
    }
}
