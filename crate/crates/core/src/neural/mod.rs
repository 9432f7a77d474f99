//! From-scratch differentiable building blocks: LSTM cell and bidirectional
//! sequence encoding, dense + softmax layers with inverted dropout,
//! cross-entropy loss, Adagrad with weight decay, and a finite-difference
//! gradient checker.
//!
//! Everything runs in double precision so gradient checks are meaningful.

mod adagrad;
mod dense;
mod gradcheck;
mod lstm;

pub use adagrad::{AdagradState, DEFAULT_EPSILON, DEFAULT_LEARNING_RATE, DEFAULT_WEIGHT_DECAY};
pub use dense::{cross_entropy, dense_softmax, sigmoid, softmax, DenseParams, PROB_FLOOR};
pub use gradcheck::{finite_diff_check, relative_error, Differentiable};
pub use lstm::{bilstm_encode, lstm_step, LstmParams};

pub(crate) use dense::{dense_softmax_backward, dense_softmax_cached, DenseCache};
pub(crate) use lstm::{lstm_backward, lstm_forward_cached, LstmCache};
