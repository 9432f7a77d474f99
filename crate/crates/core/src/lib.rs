//! Pipeline for predicting which side of a two-sided online debate made the
//! more convincing arguments.
//!
//! The crate covers the full experiment loop:
//!
//! - [`corpus`]: debate data model, JSONL ingestion, preprocessing filters,
//!   graph validation, and a deterministic fallback text embedder.
//! - [`argfeatures`]: argument-structure features (proposition n-grams,
//!   support-link n-grams, graph motif indicators) assembled into a fixed-order
//!   feature vector.
//! - [`neural`]: from-scratch differentiable building blocks (LSTM,
//!   bidirectional encoding, dense + softmax, Adagrad, gradient checking).
//! - [`model`]: the dual-stream recurrent predictor, logistic-regression
//!   baselines, and the training loop with early stopping.
//! - [`eval`]: k-fold cross-validation, significance tests, inter-annotator
//!   agreement, and winner-vs-loser feature contrast analysis.
//! - [`synthgen`]: seeded generator of synthetic labeled debates with planted
//!   persuasion signals for end-to-end validation.

pub mod argfeatures;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod model;
pub mod neural;
pub mod synthgen;

pub use argfeatures::{FeatureVector, Vocabulary};
pub use corpus::{Debate, PropositionType, Round, Side, SupportEdge, Utterance};
pub use error::{Error, Result};
pub use eval::EvalReport;
pub use model::{DualStreamModel, TrainConfig};
pub use synthgen::PlantConfig;

/// Version string embedded in every written artifact.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
