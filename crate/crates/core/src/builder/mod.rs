//! Instruction dataset construction: annotated objects in, prompt/target
//! pairs out, followed by a deterministic split and per-type balancing.

mod balance;
mod labeling;
mod record;
mod samples;
mod split;
mod stats;
pub mod templates;

pub use balance::{
    balance_corpus, BalanceConfig, BalanceWarning, Balanced, Budget, DEFAULT_DUPLICATION,
    REFERENCE_FINAL, REFERENCE_RAW,
};
pub use labeling::{validate_labeling_json, Severity, Violation};
pub use record::{
    placeholder_indices, ObjectRecord, PartAnnotation, QaPair, RecordError, MAX_Q2_WORDS,
};
pub use samples::{build_samples, task_rng, BuildError, InstructionSample, TaskType};
pub use split::{is_test_id, split_corpus, SplitError, SPLIT_BUCKETS, TEST_BUCKETS};
pub use stats::{CorpusStats, TaskStats};
