use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RptError {
    #[error("unsupported language: {0}")]
    UnsupportedLanguage(String),
    #[error("syntax error at line {line}, column {column}")]
    Syntax { line: usize, column: usize },
    #[error("malformed mapping file {path}: {reason} (line {line})")]
    MappingFormat {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("unknown category label: {0}")]
    UnknownCategoryLabel(String),
    #[error("no mapping entry for node kind `{0}`")]
    UnmappedKind(String),
    #[error("program produced no paths")]
    EmptyProgram,
    #[error("store extraction config differs from requested config: {0}")]
    ConfigMismatch(String),
    #[error("corrupt store record at byte offset {offset}: {reason}")]
    CorruptStore { offset: u64, reason: String },
    #[error("duplicate program id: {0}")]
    DuplicateId(String),
    #[error("program id not found: {0}")]
    NotFound(String),
    #[error("store is opened read-only")]
    ReadOnlyStore,
    #[error("store is locked by another writer: {0}")]
    StoreLocked(PathBuf),
    #[error("cannot build bucket boundaries from empty samples")]
    EmptySamples,
    #[error("index was built from a different store (checksum mismatch)")]
    IndexStoreMismatch,
    #[error("evaluation pair references missing unit: {0}")]
    MissingUnit(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("corrupt index: {0}")]
    CorruptIndex(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, RptError>;
