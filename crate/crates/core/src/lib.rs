//! Error-corrected cross-modal hashing.
//!
//! Two feed-forward branches map attribute bitmaps and image feature vectors
//! to `d`-bit sign codes. The codes are then snapped to the nearest
//! shortened Reed-Solomon codeword over GF(2^8) and ranked by Hamming
//! distance.
//!
//! - [`galois`]: GF(2^8) arithmetic.
//! - [`rscode`]: systematic shortened RS encoder and bounded-distance decoder.
//! - [`cmh`]: networks, objective, Adam, training, datasets, model files.
//! - [`codec`]: bit packing, symbol views, snapping, code files.
//! - [`index`]: exact Hamming top-k.
//! - [`eval`]: attribute queries and NDCG@k.
//! - [`pipeline`], [`config`]: end-to-end composition used by the CLI.

pub mod cmh;
pub mod codec;
pub mod config;
pub mod error;
pub mod eval;
pub mod galois;
pub mod index;
pub mod pipeline;
pub mod rscode;

pub use error::{Error, Result};
