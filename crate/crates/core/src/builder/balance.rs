//! Per-type rebalancing of a built corpus.

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{InstructionSample, TaskType};
use crate::hash::derive_seed;

/// Per-type counts before balancing in the reference corpus
/// (85,771 objects), indexed by task type.
pub const REFERENCE_RAW: [usize; 11] = [
    500_000, 85_771, 85_771, 506_755, 887_590, 887_590, 887_590, 577_369, 1_394_345, 883_941,
    247_998,
];

/// Per-type counts after balancing in the reference corpus.
pub const REFERENCE_FINAL: [usize; 11] = [
    500_000, 257_313, 257_313, 506_755, 506_755, 506_755, 506_755, 506_755, 247_998, 247_998,
    247_998,
];

/// T1/T2 duplication factor, 257,313 / 85,771.
pub const DEFAULT_DUPLICATION: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget {
    Unlimited,
    Count(usize),
    /// Fraction of the samples available for the type, rounded to nearest.
    Ratio(f64),
}

impl Budget {
    fn resolve(self, available: usize) -> Option<usize> {
        match self {
            Budget::Unlimited => None,
            Budget::Count(n) => Some(n),
            Budget::Ratio(r) => Some((r.max(0.0) * available as f64).round() as usize),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalanceConfig {
    pub budgets: [Budget; 11],
    /// Copies of every T1/T2 sample in the output.
    pub duplication: usize,
    pub seed: u64,
}

impl Default for BalanceConfig {
    /// T0 kept as built; T1/T2 tripled; T3–T10 scaled by the reference
    /// corpus's final/raw ratio for that type.
    fn default() -> Self {
        let budgets = std::array::from_fn(|t| match t {
            0..=2 => Budget::Unlimited,
            _ => Budget::Ratio(REFERENCE_FINAL[t] as f64 / REFERENCE_RAW[t] as f64),
        });
        Self {
            budgets,
            duplication: DEFAULT_DUPLICATION,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BalanceWarning {
    pub task_type: TaskType,
    pub budget: usize,
    pub available: usize,
}

impl std::fmt::Display for BalanceWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: budget {} exceeds the {} available samples",
            self.task_type, self.budget, self.available
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Balanced {
    pub samples: Vec<InstructionSample>,
    pub warnings: Vec<BalanceWarning>,
}

fn downsample(
    items: Vec<InstructionSample>,
    keep: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<InstructionSample> {
    if keep >= items.len() {
        return items;
    }
    let mut picked = index::sample(rng, items.len(), keep).into_vec();
    picked.sort_unstable();
    let mut slots: Vec<Option<InstructionSample>> = items.into_iter().map(Some).collect();
    picked
        .into_iter()
        .map(|i| slots[i].take().expect("distinct indices"))
        .collect()
}

/// Applies the per-type policy and shuffles the result with the seed.
///
/// * T0 passes through unless given an explicit budget.
/// * T1/T2 are repeated `duplication` times, then limited by any budget.
/// * T3–T7 are downsampled without replacement to their budget.
/// * T8–T10 keep the first `budget` samples in input order.
pub fn balance_corpus(samples: Vec<InstructionSample>, cfg: &BalanceConfig) -> Balanced {
    let mut by_type: Vec<Vec<InstructionSample>> = vec![Vec::new(); 11];
    for s in samples {
        by_type[s.task_type.index()].push(s);
    }

    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for (t, mut items) in by_type.into_iter().enumerate() {
        let task = TaskType::ALL[t];
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[b"balance", &[t as u8]]));
        if matches!(task, TaskType::MultiPartCoarse | TaskType::MultiPartFine) {
            items = items
                .into_iter()
                .flat_map(|s| std::iter::repeat_n(s, cfg.duplication))
                .collect();
        }
        let available = items.len();
        let budget = cfg.budgets[t].resolve(available);
        if let Some(b) = budget {
            if b > available {
                warnings.push(BalanceWarning {
                    task_type: task,
                    budget: b,
                    available,
                });
            }
            items = match task {
                TaskType::Delete | TaskType::Modify | TaskType::Add => {
                    items.truncate(b);
                    items
                }
                _ => downsample(items, b, &mut rng),
            };
        }
        out.extend(items);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[b"shuffle"]));
    out.shuffle(&mut rng);
    Balanced {
        samples: out,
        warnings,
    }
}
