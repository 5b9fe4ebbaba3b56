//! Reversible data hiding for baseline grayscale JPEG files.
//!
//! Payload bits are split between the quantized DCT coefficients (histogram
//! shifting of ±1 values) and the Huffman-coded stream (peak/zero shifting of
//! the run/length code histogram). Both embeddings are exactly invertible:
//! extraction returns the payload and the original file byte for byte.

pub mod cost;
pub mod dct_domain;
pub mod entropy_domain;
pub mod distribution;
pub mod error;
pub mod jpeg;
pub mod metrics;
pub mod pipeline;
pub mod side_info;

pub use error::{Error, Result};
