//! Dense layer with inverted dropout, stable softmax, and cross-entropy.

use ndarray::{Array1, Array2};
use rand::Rng;

use crate::error::{Error, Result};

/// Floor applied to probabilities before taking logarithms.
pub const PROB_FLOOR: f64 = 1e-12;

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Fully connected layer parameters: weight (out_dim, in_dim) and bias.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseParams {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

impl DenseParams {
    pub fn zeros(in_dim: usize, out_dim: usize) -> Self {
        DenseParams {
            w: Array2::zeros((out_dim, in_dim)),
            b: Array1::zeros(out_dim),
        }
    }

    pub fn init(in_dim: usize, out_dim: usize, rng: &mut impl Rng) -> Self {
        let mut p = DenseParams::zeros(in_dim, out_dim);
        let bound = 1.0 / (in_dim as f64).sqrt();
        for v in p.w.iter_mut() {
            *v = rng.gen_range(-bound..bound);
        }
        p
    }

    pub fn in_dim(&self) -> usize {
        self.w.ncols()
    }

    pub fn out_dim(&self) -> usize {
        self.w.nrows()
    }

    pub fn param_count(&self) -> usize {
        self.w.len() + self.b.len()
    }

    pub(crate) fn param_slices(&self) -> Vec<&[f64]> {
        vec![
            self.w.as_slice().expect("contiguous"),
            self.b.as_slice().expect("contiguous"),
        ]
    }

    pub(crate) fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        vec![
            self.w.as_slice_mut().expect("contiguous"),
            self.b.as_slice_mut().expect("contiguous"),
        ]
    }
}

/// Numerically stable softmax: subtract the max before exponentiating.
pub fn softmax(logits: &Array1<f64>) -> Array1<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out = logits.mapv(|v| (v - max).exp());
    let sum = out.sum();
    out.mapv_inplace(|v| v / sum);
    out
}

/// Negative log-probability of the true class, with the probability floored
/// at [`PROB_FLOOR`] before the log.
pub fn cross_entropy(probs: &Array1<f64>, label: usize) -> f64 {
    -probs[label].max(PROB_FLOOR).ln()
}

/// Inverted dropout on the input (training only), then affine map, then
/// softmax. At inference the input passes through unmasked and the output is
/// independent of the generator.
pub fn dense_softmax(
    x: &Array1<f64>,
    p: &DenseParams,
    dropout_rate: f64,
    training: bool,
    rng: &mut impl Rng,
) -> Result<Array1<f64>> {
    let cache = dense_softmax_cached(x, p, dropout_rate, training, rng)?;
    Ok(cache.probs)
}

/// Cache from a dense + softmax forward pass.
#[derive(Debug, Clone)]
pub(crate) struct DenseCache {
    /// Per-element dropout scale: 0 for dropped inputs, 1/(1-rate) for kept
    /// ones, exactly 1 at inference.
    pub scale: Array1<f64>,
    /// Input after dropout scaling.
    pub x_dropped: Array1<f64>,
    pub probs: Array1<f64>,
}

pub(crate) fn dense_softmax_cached(
    x: &Array1<f64>,
    p: &DenseParams,
    dropout_rate: f64,
    training: bool,
    rng: &mut impl Rng,
) -> Result<DenseCache> {
    if x.len() != p.in_dim() {
        return Err(Error::DimensionMismatch(format!(
            "dense input has length {} but the layer expects {}",
            x.len(),
            p.in_dim()
        )));
    }
    debug_assert!((0.0..1.0).contains(&dropout_rate));

    let scale = if training && dropout_rate > 0.0 {
        let keep = 1.0 - dropout_rate;
        Array1::from_iter((0..x.len()).map(|_| {
            if rng.gen::<f64>() < keep {
                1.0 / keep
            } else {
                0.0
            }
        }))
    } else {
        Array1::ones(x.len())
    };
    let x_dropped = x * &scale;
    let logits = p.w.dot(&x_dropped) + &p.b;
    Ok(DenseCache {
        scale,
        x_dropped,
        probs: softmax(&logits),
    })
}

/// Gradient of a loss with respect to softmax inputs, given the gradient
/// with respect to the softmax outputs:
/// `d_logit_j = p_j * (d_prob_j - sum_k d_prob_k * p_k)`.
pub(crate) fn softmax_backward(probs: &Array1<f64>, d_probs: &Array1<f64>) -> Array1<f64> {
    let dot = d_probs.dot(probs);
    probs * &(d_probs - dot)
}

/// Backward through softmax, affine map, and dropout. Accumulates weight
/// gradients into `grads` and returns the gradient with respect to the
/// pre-dropout input.
pub(crate) fn dense_softmax_backward(
    p: &DenseParams,
    cache: &DenseCache,
    d_probs: &Array1<f64>,
    grads: &mut DenseParams,
) -> Array1<f64> {
    let d_logits = softmax_backward(&cache.probs, d_probs);
    for (j, &dl) in d_logits.iter().enumerate() {
        let mut row = grads.w.row_mut(j);
        row += &(&cache.x_dropped * dl);
    }
    grads.b += &d_logits;
    let d_x_dropped = p.w.t().dot(&d_logits);
    d_x_dropped * &cache.scale
}
