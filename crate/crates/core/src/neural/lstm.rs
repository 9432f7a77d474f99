//! LSTM cell and bidirectional sequence encoder.
//!
//! Gate equations, for input x, previous hidden h, previous cell c:
//!
//! ```text
//! i = sigmoid(Wi x + Ui h + bi)      f = sigmoid(Wf x + Uf h + bf)
//! g = tanh   (Wg x + Ug h + bg)      o = sigmoid(Wo x + Uo h + bo)
//! c' = f * c + i * g                 h' = o * tanh(c')
//! ```
//!
//! The four gates are stored stacked in the order `[i, f, g, o]` so that the
//! input projection for a whole sequence is a single matrix product.

use ndarray::{s, Array1, Array2, ArrayView1, Axis};
use rand::Rng;

use crate::error::{Error, Result};

use super::sigmoid;

/// Parameters of one directional LSTM. `wx` holds the four input-to-gate
/// matrices stacked row-wise, `wh` the four hidden-to-gate matrices, `b` the
/// four gate biases.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams {
    pub input_dim: usize,
    pub hidden_dim: usize,
    /// (4 * hidden_dim, input_dim)
    pub wx: Array2<f64>,
    /// (4 * hidden_dim, hidden_dim)
    pub wh: Array2<f64>,
    /// (4 * hidden_dim,)
    pub b: Array1<f64>,
}

impl LstmParams {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> Self {
        LstmParams {
            input_dim,
            hidden_dim,
            wx: Array2::zeros((4 * hidden_dim, input_dim)),
            wh: Array2::zeros((4 * hidden_dim, hidden_dim)),
            b: Array1::zeros(4 * hidden_dim),
        }
    }

    /// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)] per matrix; biases
    /// zero except the forget gate's, which starts at 1.
    pub fn init(input_dim: usize, hidden_dim: usize, rng: &mut impl Rng) -> Self {
        let mut p = LstmParams::zeros(input_dim, hidden_dim);
        let bx = 1.0 / (input_dim as f64).sqrt();
        for v in p.wx.iter_mut() {
            *v = rng.gen_range(-bx..bx);
        }
        let bh = 1.0 / (hidden_dim as f64).sqrt();
        for v in p.wh.iter_mut() {
            *v = rng.gen_range(-bh..bh);
        }
        p.b.slice_mut(s![hidden_dim..2 * hidden_dim]).fill(1.0);
        p
    }

    pub fn param_count(&self) -> usize {
        self.wx.len() + self.wh.len() + self.b.len()
    }

    pub(crate) fn param_slices(&self) -> Vec<&[f64]> {
        vec![
            self.wx.as_slice().expect("contiguous"),
            self.wh.as_slice().expect("contiguous"),
            self.b.as_slice().expect("contiguous"),
        ]
    }

    pub(crate) fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        vec![
            self.wx.as_slice_mut().expect("contiguous"),
            self.wh.as_slice_mut().expect("contiguous"),
            self.b.as_slice_mut().expect("contiguous"),
        ]
    }
}

/// One LSTM step. Returns the next hidden and cell vectors.
pub fn lstm_step(
    x: ArrayView1<'_, f64>,
    h: &Array1<f64>,
    c: &Array1<f64>,
    p: &LstmParams,
) -> Result<(Array1<f64>, Array1<f64>)> {
    if x.len() != p.input_dim || h.len() != p.hidden_dim || c.len() != p.hidden_dim {
        return Err(Error::DimensionMismatch(format!(
            "lstm step: x {} h {} c {} vs params ({}, {})",
            x.len(),
            h.len(),
            c.len(),
            p.input_dim,
            p.hidden_dim
        )));
    }
    let xproj = p.wx.dot(&x);
    let (h_next, c_next, _) = step_from_projection(p, xproj.view(), h, c);
    Ok((h_next, c_next))
}

/// Shared kernel: given this step's input projection, compute the next
/// state. Returns (h', c', post-activation gates).
fn step_from_projection(
    p: &LstmParams,
    xproj: ArrayView1<'_, f64>,
    h: &Array1<f64>,
    c: &Array1<f64>,
) -> (Array1<f64>, Array1<f64>, Array1<f64>) {
    let hd = p.hidden_dim;
    let mut a = &xproj + &p.wh.dot(h) + &p.b;
    for j in 0..hd {
        a[j] = sigmoid(a[j]); // i
        a[hd + j] = sigmoid(a[hd + j]); // f
        a[2 * hd + j] = a[2 * hd + j].tanh(); // g
        a[3 * hd + j] = sigmoid(a[3 * hd + j]); // o
    }
    let mut c_next = Array1::zeros(hd);
    let mut h_next = Array1::zeros(hd);
    for j in 0..hd {
        c_next[j] = a[hd + j] * c[j] + a[j] * a[2 * hd + j];
        h_next[j] = a[3 * hd + j] * c_next[j].tanh();
    }
    (h_next, c_next, a)
}

/// Everything the backward pass needs from a forward run over a sequence.
#[derive(Debug, Clone)]
pub(crate) struct LstmCache {
    /// (T, input_dim) inputs in processing order.
    pub xs: Array2<f64>,
    /// (T + 1, hidden_dim); row 0 is the zero initial state.
    pub hs: Array2<f64>,
    /// (T + 1, hidden_dim).
    pub cs: Array2<f64>,
    /// (T, 4 * hidden_dim) post-activation gates.
    pub gates: Array2<f64>,
    /// (T, hidden_dim) tanh of each new cell state.
    pub tanh_c: Array2<f64>,
}

impl LstmCache {
    pub fn final_hidden(&self) -> Array1<f64> {
        self.hs.row(self.hs.nrows() - 1).to_owned()
    }
}

/// Run a directional LSTM over `xs` (rows are timesteps, already in
/// processing order) from zero initial states, keeping caches.
pub(crate) fn lstm_forward_cached(p: &LstmParams, xs: &Array2<f64>) -> LstmCache {
    let t_len = xs.nrows();
    let hd = p.hidden_dim;
    // Input projections for all timesteps at once.
    let xproj = xs.dot(&p.wx.t()); // (T, 4H)

    let mut hs = Array2::zeros((t_len + 1, hd));
    let mut cs = Array2::zeros((t_len + 1, hd));
    let mut gates = Array2::zeros((t_len, 4 * hd));
    let mut tanh_c = Array2::zeros((t_len, hd));

    let mut h = Array1::zeros(hd);
    let mut c = Array1::zeros(hd);
    for t in 0..t_len {
        let (h_next, c_next, acts) = step_from_projection(p, xproj.row(t), &h, &c);
        gates.row_mut(t).assign(&acts);
        for j in 0..hd {
            tanh_c[[t, j]] = c_next[j].tanh();
        }
        hs.row_mut(t + 1).assign(&h_next);
        cs.row_mut(t + 1).assign(&c_next);
        h = h_next;
        c = c_next;
    }

    LstmCache {
        xs: xs.clone(),
        hs,
        cs,
        gates,
        tanh_c,
    }
}

/// Backpropagation through time for a loss that depends only on the final
/// hidden state. Accumulates parameter gradients into `grads`.
pub(crate) fn lstm_backward(
    p: &LstmParams,
    cache: &LstmCache,
    d_h_final: &Array1<f64>,
    grads: &mut LstmParams,
) {
    let t_len = cache.xs.nrows();
    if t_len == 0 {
        return;
    }
    let hd = p.hidden_dim;

    let mut d_h = d_h_final.clone();
    let mut d_c: Array1<f64> = Array1::zeros(hd);
    let mut d_acts = Array2::zeros((t_len, 4 * hd)); // d loss / d pre-activations

    for t in (0..t_len).rev() {
        let gate = cache.gates.row(t);
        let c_prev = cache.cs.row(t);
        let tanh_c = cache.tanh_c.row(t);
        let mut da = Array1::zeros(4 * hd);
        for j in 0..hd {
            let i = gate[j];
            let f = gate[hd + j];
            let g = gate[2 * hd + j];
            let o = gate[3 * hd + j];
            let tc = tanh_c[j];

            let dc_total = d_c[j] + d_h[j] * o * (1.0 - tc * tc);
            da[3 * hd + j] = d_h[j] * tc * o * (1.0 - o);
            da[j] = dc_total * g * i * (1.0 - i);
            da[2 * hd + j] = dc_total * i * (1.0 - g * g);
            da[hd + j] = dc_total * c_prev[j] * f * (1.0 - f);
            d_c[j] = dc_total * f;
        }
        d_h = p.wh.t().dot(&da);
        d_acts.row_mut(t).assign(&da);
    }

    // Weight gradients for the whole sequence in two matrix products.
    grads.wx += &d_acts.t().dot(&cache.xs);
    let h_prev = cache.hs.slice(s![..t_len, ..]);
    grads.wh += &d_acts.t().dot(&h_prev);
    grads.b += &d_acts.sum_axis(Axis(0));
}

/// Encode a sequence with a bidirectional LSTM: run the forward direction
/// left to right and the backward direction right to left, both from zero
/// states, and concatenate the two final hidden vectors. An empty sequence
/// encodes to the zero vector.
pub fn bilstm_encode(
    seq: &[Array1<f64>],
    fwd: &LstmParams,
    bwd: &LstmParams,
) -> Result<Array1<f64>> {
    if fwd.hidden_dim != bwd.hidden_dim || fwd.input_dim != bwd.input_dim {
        return Err(Error::DimensionMismatch(format!(
            "bilstm direction shapes differ: fwd ({}, {}) vs bwd ({}, {})",
            fwd.input_dim, fwd.hidden_dim, bwd.input_dim, bwd.hidden_dim
        )));
    }
    for (t, x) in seq.iter().enumerate() {
        if x.len() != fwd.input_dim {
            return Err(Error::DimensionMismatch(format!(
                "bilstm input at step {t} has length {} but the encoder expects {}",
                x.len(),
                fwd.input_dim
            )));
        }
    }
    let t_len = seq.len();
    let mut xs = Array2::zeros((t_len, fwd.input_dim));
    for (t, x) in seq.iter().enumerate() {
        xs.row_mut(t).assign(x);
    }
    let mut xs_rev = Array2::zeros((t_len, fwd.input_dim));
    for t in 0..t_len {
        xs_rev.row_mut(t).assign(&xs.row(t_len - 1 - t));
    }
    let f = lstm_forward_cached(fwd, &xs);
    let b = lstm_forward_cached(bwd, &xs_rev);
    let mut out = Array1::zeros(2 * fwd.hidden_dim);
    out.slice_mut(s![..fwd.hidden_dim]).assign(&f.final_hidden());
    out.slice_mut(s![fwd.hidden_dim..]).assign(&b.final_hidden());
    Ok(out)
}
