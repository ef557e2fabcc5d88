use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the core numeric and model-handling code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: left is {left:?}, right is {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("tensor data length {got} does not match {rows}x{cols}")]
    DataLength { rows: usize, cols: usize, got: usize },

    #[error("invalid bit width {0}; allowed values are 1, 2, 4, 8, 16 and 32")]
    InvalidBits(u8),

    #[error("quantizer input {0} outside [0, 1]; clip before quantizing")]
    UnitRange(f32),

    #[error("target index {target} out of range for vocabulary of {vocab} (row {row})")]
    TargetOutOfRange { row: usize, target: usize, vocab: usize },

    #[error("token id {token} out of range for vocabulary of {vocab} (position {position})")]
    TokenOutOfRange { position: usize, token: u32, vocab: usize },

    #[error("value {value} at ({row}, {col}) is not on the {bits}-bit level grid")]
    NotOnGrid { row: usize, col: usize, value: f32, bits: u8 },

    #[error(
        "integer accumulator could overflow: inner dim {inner} with code magnitudes \
         {max_a}x{max_b} needs up to {needed} but the i64 limit is {limit}"
    )]
    AccumulatorOverflow { inner: usize, max_a: u64, max_b: u64, needed: u128, limit: i64 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("token stream of {len} tokens is too short for batch {batch} x seqlen {seqlen}")]
    StreamTooShort { len: usize, batch: usize, seqlen: usize },

    #[error("training diverged: loss became non-finite at epoch {epoch}, window {window}")]
    Divergence { epoch: usize, window: usize },

    #[error("layer chain broken at layer {index}: expected in_dim {expected}, found {found}")]
    ChainMismatch { index: usize, expected: usize, found: usize },

    #[error("layer {index} has invalid dimension {dim}")]
    InvalidLayerDim { index: usize, dim: usize },

    #[error("widening factor {0} must be greater than 1")]
    InvalidFactor(f64),

    #[error("budget fraction {0} must be non-negative")]
    InvalidBudget(f64),

    #[error("widening plan selects layer {index}, which {reason}")]
    InvalidSelection { index: usize, reason: &'static str },

    #[error("unknown token {0:?} cannot be encoded under this vocabulary")]
    UnknownToken(String),

    #[error("vocabulary capacity {0} is too small; word mode needs room for <unk> and <eos>")]
    VocabTooSmall(usize),
}
