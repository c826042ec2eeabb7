use thiserror::Error;

/// Invalid miner configuration. Always raised at construction, never while
/// parsing.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("sigma must lie in [0, 1], got {0}")]
    InvalidSigma(f64),
    #[error("phi must be at least 1, got {0}")]
    InvalidPhi(usize),
    #[error("invalid mask rule {pattern:?}: {source}")]
    InvalidMask {
        pattern: String,
        #[source]
        source: regex::Error,
    },
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a miner snapshot (bad magic header)")]
    BadMagic,
    #[error("unsupported snapshot version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("corrupt snapshot: {0}")]
    Corrupt(String),
    #[error("snapshot carries an invalid configuration: {0}")]
    Config(#[from] ConfigError),
}

/// A broken structural invariant of the search tree.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("tree invariant violated: {0}")]
pub struct InvariantViolation(pub String);
