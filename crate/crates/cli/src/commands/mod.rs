mod build;
mod cluster;
mod eval;
mod execute;
mod segment;
mod validate;

pub use build::run as build;
pub use cluster::run as cluster;
pub use eval::run as eval;
pub use execute::run as execute;
pub use segment::run as segment;
pub use validate::run as validate;

use crate::failure::{CliResult, Failure};

/// Runs `f` on a pool of `workers` threads. Callers collect through indexed
/// parallel iterators, so output order never depends on the worker count.
pub(crate) fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Failure::config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Non-blank lines with their 1-based line numbers.
pub(crate) fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty())
}
