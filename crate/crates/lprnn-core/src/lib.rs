//! Quantization-aware recurrent language modeling with exact size, memory
//! and compute accounting.
//!
//! The crate reduces weight/activation bit widths of a single-layer LSTM
//! language model (straight-through-estimator training, bit-packed storage,
//! integer-accumulated GEMM) and implements the complementary
//! neuron-increase transform that widens selected layers to win back the
//! accuracy lost to quantization, with exact k/32 bookkeeping for the
//! resulting bit-by-width trade-offs.

pub mod accounting;
pub mod corpus;
pub mod error;
pub mod lstm;
pub mod packed;
pub mod quant;
pub mod tensor;
pub mod train;
pub mod widening;

pub use error::{Error, Result};
pub use quant::QuantSpec;
pub use tensor::{SeededRng, Tensor};
