//! Multimodal movie content representation and similarity ranking.
//!
//! Subtitles become tf-idf, LSI and LDA vectors; audio segments become
//! genre and event class histograms; metadata becomes one-hot vectors. Each
//! modality yields a cosine similarity matrix, matrices are fused by weighted
//! sum, and rankings are scored against a tag-space ground truth.

pub mod api;
pub mod audio;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod pipeline;
pub mod similarity;
pub mod text;
pub mod topics;

pub use error::{Error, Result};
