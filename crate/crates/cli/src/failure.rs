//! Exit-code classification: 1 for domain failures, 2 for I/O and
//! configuration failures.

use std::fmt;
use std::path::Path;

pub const EXIT_DOMAIN: u8 = 1;
pub const EXIT_IO: u8 = 2;

#[derive(Debug)]
pub enum Failure {
    /// Input was read but is invalid, or a check did not pass.
    Domain(anyhow::Error),
    /// Files could not be read or written, or flags are inconsistent.
    Io(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => EXIT_DOMAIN,
            Failure::Io(_) => EXIT_IO,
        }
    }

    pub fn domain(msg: impl fmt::Display) -> Self {
        Failure::Domain(anyhow::anyhow!("{msg}"))
    }

    pub fn config(msg: impl fmt::Display) -> Self {
        Failure::Io(anyhow::anyhow!("{msg}"))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Domain(e) | Failure::Io(e) => write!(f, "{e:#}"),
        }
    }
}

pub type CliResult<T = ()> = Result<T, Failure>;

pub fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(anyhow::anyhow!("cannot read {}: {e}", path.display())))
}

pub fn write_file(path: &Path, contents: &str) -> CliResult {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::Io(anyhow::anyhow!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, contents)
        .map_err(|e| Failure::Io(anyhow::anyhow!("cannot write {}: {e}", path.display())))
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, contents: &str) -> CliResult {
    match path {
        Some(p) => write_file(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

/// Domain error tagged with its file and line.
pub fn at_line(path: &Path, line: usize, err: impl fmt::Display) -> Failure {
    Failure::domain(format!("{}:{line}: {err}", path.display()))
}

pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}
