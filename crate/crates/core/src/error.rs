use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("unsupported Matrix Market format: {0}")]
    UnsupportedFormat(String),

    #[error("malformed Matrix Market file at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("matrix is structurally singular ({} unmatched rows)", unmatched_rows.len())]
    StructurallySingular { unmatched_rows: Vec<usize> },

    /// Every candidate pivot of a level was deferred.
    #[error("level {level} collapsed: all {size} rows were deferred")]
    LevelCollapse { level: usize, size: usize },

    #[error("preconditioner construction failed: {0}")]
    Build(String),

    #[error("iterative solver diverged: {0}")]
    Divergence(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
