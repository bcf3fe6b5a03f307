//! Deterministic train/test partition by object id.

use std::collections::HashSet;

use thiserror::Error;

use crate::hash::stable_hash;

/// Hash buckets; ids landing in the first [`TEST_BUCKETS`] go to test.
pub const SPLIT_BUCKETS: u64 = 1000;
/// 5 of 1000 buckets, a 0.5% test split.
pub const TEST_BUCKETS: u64 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error("duplicate object id {0:?}")]
    DuplicateId(String),
}

/// Whether an id belongs to the test split. Depends on nothing but the id.
pub fn is_test_id(id: &str) -> bool {
    stable_hash(id.as_bytes()) % SPLIT_BUCKETS < TEST_BUCKETS
}

/// Returns `(train, test)`, each in input order.
pub fn split_corpus<S: AsRef<str>>(ids: &[S]) -> Result<(Vec<String>, Vec<String>), SplitError> {
    let mut seen = HashSet::with_capacity(ids.len());
    let mut train = Vec::new();
    let mut test = Vec::new();
    for id in ids {
        let id = id.as_ref();
        if !seen.insert(id) {
            return Err(SplitError::DuplicateId(id.to_string()));
        }
        if is_test_id(id) {
            test.push(id.to_string());
        } else {
            train.push(id.to_string());
        }
    }
    Ok((train, test))
}
