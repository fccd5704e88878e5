//! Reference-free factuality scoring for video captions.
//!
//! Frozen frame and token features are projected by a pair of linear maps
//! and compared in a shared space: a coarse cosine between the pooled video
//! and the sentence, and a fine score matching every caption token to its
//! best frame. The maps are finetuned on automatically corrupted captions.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); on-disk
//! matrices are always `f32`.

pub mod analysis;
pub mod augment;
pub mod corpus;
pub mod embedstore;
pub mod error;
pub mod matrix;
pub mod scalar;
pub mod scoring;
pub mod trainer;

pub use error::{Error, FormatError, Result};
pub use matrix::Matrix;
pub use scalar::Scalar;

pub type Matrix32 = matrix::Matrix<f32>;
pub type Matrix64 = matrix::Matrix<f64>;
pub type Weights32 = embedstore::ProjectionWeights<f32>;
pub type Weights64 = embedstore::ProjectionWeights<f64>;
