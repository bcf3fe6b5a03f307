use std::collections::HashSet;

use partgram::builder::{
    balance_corpus, build_samples, is_test_id, placeholder_indices, split_corpus, BalanceConfig,
    InstructionSample, ObjectRecord, TaskType,
};
use partgram::grammar::{lex, parse_program, sort_parts, QuantBox};
use partgram::synth;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn corpus(seed: u64, n: usize) -> Vec<ObjectRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| synth::object_record(&mut rng, &format!("obj{i:04}"), 6))
        .collect()
}

fn all_samples(records: &[ObjectRecord], seed: u64) -> Vec<InstructionSample> {
    records
        .iter()
        .flat_map(|r| {
            let types: Vec<TaskType> = TaskType::ALL
                .into_iter()
                .filter(|t| *t != TaskType::PartQa || !r.qa.is_empty())
                .collect();
            build_samples(r, &types, seed).unwrap()
        })
        .collect()
}

fn source_boxes(r: &ObjectRecord) -> Vec<QuantBox> {
    r.parts.iter().map(|p| p.bbox.quantize()).collect()
}

/// Whether `sub` is a sub-multiset of `all`.
fn sub_multiset(sub: &[QuantBox], all: &[QuantBox]) -> bool {
    let mut pool = all.to_vec();
    sub.iter().all(|b| match pool.iter().position(|x| x == b) {
        Some(i) => {
            pool.swap_remove(i);
            true
        }
        None => false,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_target_parses_in_canonical_order(seed in any::<u64>()) {
        let records = corpus(seed, 4);
        for r in &records {
            let src = source_boxes(r);
            for s in all_samples(std::slice::from_ref(r), seed) {
                let program = parse_program(&lex(&s.target)).unwrap();
                prop_assert_eq!(program.render().unwrap(), s.target.clone());
                let boxes = program.boxes();
                match s.task_type {
                    TaskType::BoxListing | TaskType::MultiPartCoarse | TaskType::MultiPartFine => {
                        prop_assert_eq!(boxes, sort_parts(&src));
                    }
                    // Answers may cite one part several times.
                    TaskType::PartQa => {
                        prop_assert!(boxes.iter().all(|b| src.contains(b)));
                        prop_assert!(placeholder_indices(&s.target).is_empty());
                        prop_assert!(!s.target.contains("<Part_"));
                    }
                    _ => {
                        prop_assert!(sub_multiset(&boxes, &src));
                        prop_assert_eq!(sort_parts(&boxes), boxes);
                    }
                }
            }
        }
    }

    #[test]
    fn build_and_balance_are_deterministic(seed in any::<u64>()) {
        let records = corpus(seed, 3);
        let run = || {
            let cfg = BalanceConfig { seed, ..BalanceConfig::default() };
            let out = balance_corpus(all_samples(&records, seed), &cfg).samples;
            out.iter().map(|s| serde_json::to_string(s).unwrap()).collect::<Vec<_>>().join("\n")
        };
        prop_assert_eq!(run(), run());
    }

    #[test]
    fn split_ignores_unrelated_ids(ids in prop::collection::hash_set("[a-z0-9]{1,12}", 1..200),
                                   extra in prop::collection::hash_set("[A-Z]{1,12}", 0..50)) {
        let base: Vec<String> = ids.iter().cloned().collect();
        let (_, test_a) = split_corpus(&base).unwrap();
        let mut grown = base.clone();
        grown.extend(extra.iter().cloned());
        let (_, test_b) = split_corpus(&grown).unwrap();
        let before: HashSet<_> = test_a.into_iter().collect();
        let after: HashSet<_> = test_b.into_iter().filter(|id| ids.contains(id)).collect();
        prop_assert_eq!(before, after);
    }
}

#[test]
fn multi_part_types_are_tripled() {
    let records = corpus(11, 50);
    let raw = all_samples(&records, 0);
    let count =
        |v: &[InstructionSample], t: TaskType| v.iter().filter(|s| s.task_type == t).count();
    let balanced = balance_corpus(raw.clone(), &BalanceConfig::default()).samples;
    for t in [TaskType::MultiPartCoarse, TaskType::MultiPartFine] {
        assert_eq!(count(&raw, t), 50);
        assert_eq!(count(&balanced, t), 3 * count(&raw, t));
    }
    assert_eq!(
        count(&balanced, TaskType::BoxListing),
        count(&raw, TaskType::BoxListing)
    );
}

#[test]
fn split_fraction_near_half_percent() {
    let n = 100_000;
    let test = (0..n)
        .filter(|i| is_test_id(&format!("object-{i}")))
        .count();
    let frac = test as f64 / n as f64;
    assert!((frac - 0.005).abs() <= 0.0015, "test fraction {frac}");
}
