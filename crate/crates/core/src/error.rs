use std::io;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty input: no facts found")]
    EmptyInput,

    #[error("unknown {kind} {id}")]
    UnknownId { kind: &'static str, id: usize },

    #[error("unknown {kind} name {name:?}")]
    UnknownName { kind: &'static str, name: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value: {0}")]
    NonFinite(f64),

    #[error("no model component enabled")]
    NoComponents,

    #[error("relation {0} holds for every tuple; no negative can be sampled")]
    DegenerateRelation(usize),

    #[error("relation {0} has no observed tuples")]
    NoPositives(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid evaluation input: {0}")]
    Evaluation(String),

    #[error("synthetic corpus: {0}")]
    Synth(String),

    #[error("model file: {0}")]
    ModelFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
