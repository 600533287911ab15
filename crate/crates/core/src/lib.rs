//! Turns raw IoT sensor recordings into LLM-friendly text, retrieves
//! supporting knowledge with a hybrid sparse/dense search, assembles
//! chain-of-thought prompts, talks to chat-completion providers, and scores
//! the answers over a five-task benchmark.
//!
//! Numeric code is generic over the scalar type via [`Real`]; the pipeline
//! itself runs on the [`Scalar`] alias.

pub mod bench;
pub mod gateway;
pub mod kb;
pub mod preprocess;
pub mod prompt;
pub mod retrieval;
pub mod scalar;

mod digest;
mod parallel;
mod tokenize;

pub use scalar::Real;

/// Scalar type used by the concrete pipeline.
pub type Scalar = f64;
/// Multi-channel sensor recording over the pipeline scalar.
pub type Series = preprocess::TimeSeries<Scalar>;
/// Per-channel statistics over the pipeline scalar.
pub type Features = preprocess::StatFeatures<Scalar>;
/// Embedding vector over the pipeline scalar.
pub type Embedding = Vec<Scalar>;
/// Knowledge/demonstration index over the pipeline scalar.
pub type Index = kb::KbIndex<Scalar>;
