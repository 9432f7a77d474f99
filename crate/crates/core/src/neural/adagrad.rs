//! Adagrad with classical L2 weight decay.
//!
//! Weight decay is added to the raw gradient before it enters the squared
//! accumulator: `g' = g + weight_decay * param`, `acc += g'^2`,
//! `param -= lr * g' / (sqrt(acc) + eps)`.

pub const DEFAULT_LEARNING_RATE: f64 = 0.005;
pub const DEFAULT_WEIGHT_DECAY: f64 = 0.01;
pub const DEFAULT_EPSILON: f64 = 1e-8;

/// Per-parameter accumulated squared gradients, mirroring the shapes of the
/// parameter slices it was built from.
#[derive(Debug, Clone)]
pub struct AdagradState {
    pub epsilon: f64,
    accum: Vec<Vec<f64>>,
}

impl AdagradState {
    pub fn new_like(params: &[&[f64]], epsilon: f64) -> Self {
        AdagradState {
            epsilon,
            accum: params.iter().map(|p| vec![0.0; p.len()]).collect(),
        }
    }

    pub fn accumulators(&self) -> &[Vec<f64>] {
        &self.accum
    }

    /// One update over every parameter slice.
    pub fn step(
        &mut self,
        params: &mut [&mut [f64]],
        grads: &[&[f64]],
        lr: f64,
        weight_decay: f64,
    ) {
        assert_eq!(params.len(), self.accum.len(), "parameter group count");
        assert_eq!(grads.len(), self.accum.len(), "gradient group count");
        for ((p, g), acc) in params.iter_mut().zip(grads).zip(&mut self.accum) {
            assert_eq!(p.len(), g.len(), "parameter/gradient shape");
            assert_eq!(p.len(), acc.len(), "parameter/state shape");
            for j in 0..p.len() {
                let g_eff = g[j] + weight_decay * p[j];
                acc[j] += g_eff * g_eff;
                p[j] -= lr * g_eff / (acc[j].sqrt() + self.epsilon);
            }
        }
    }
}
