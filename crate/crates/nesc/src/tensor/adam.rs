//! Adam parameter updates with bias correction and global-norm clipping.

use super::Tensor;
use crate::error::{Error, Result};

/// Adam hyperparameters.
#[derive(Debug, Clone)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First/second-moment accumulators for one set of parameter blocks.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<Tensor>,
    v: Vec<Tensor>,
    step: u64,
}

impl AdamState {
    /// Zero moments matching the given parameter blocks.
    pub fn new(blocks: &[&Tensor]) -> Self {
        AdamState {
            m: blocks.iter().map(|t| Tensor::zeros(t.shape().to_vec())).collect(),
            v: blocks.iter().map(|t| Tensor::zeros(t.shape().to_vec())).collect(),
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }
}

/// Scales all gradients so their joint L2 norm is at most `max_norm`.
/// Returns the pre-clip norm.
pub fn clip_global_norm(grads: &mut [Tensor], max_norm: f64) -> f64 {
    let norm = grads.iter().map(Tensor::l2_norm_sq).sum::<f64>().sqrt();
    if norm > max_norm && norm > 0.0 {
        let s = max_norm / norm;
        for g in grads.iter_mut() {
            for v in g.data_mut() {
                *v *= s;
            }
        }
    }
    norm
}

/// One Adam update over named parameter blocks.
///
/// Blocks, gradients, and state entries must be parallel slices. A
/// non-finite gradient aborts with a training error naming the block.
pub fn adam_step(
    blocks: &mut [(&'static str, &mut Tensor)],
    grads: &[Tensor],
    state: &mut AdamState,
    cfg: &AdamConfig,
) -> Result<()> {
    if blocks.len() != grads.len() || blocks.len() != state.m.len() {
        return Err(Error::Usage(format!(
            "adam_step: {} blocks vs {} grads vs {} state entries",
            blocks.len(),
            grads.len(),
            state.m.len()
        )));
    }
    if cfg.lr <= 0.0 {
        return Err(Error::Usage("adam_step: learning rate must be positive".into()));
    }
    for ((name, p), g) in blocks.iter().zip(grads) {
        if p.shape() != g.shape() {
            return Err(Error::Dimension(format!(
                "adam_step: block {name} has shape {:?} but gradient {:?}",
                p.shape(),
                g.shape()
            )));
        }
        if !g.all_finite() {
            return Err(Error::Training(format!(
                "non-finite gradient in parameter block {name}"
            )));
        }
    }

    state.step += 1;
    let t = state.step as f64;
    let bc1 = 1.0 - cfg.beta1.powf(t);
    let bc2 = 1.0 - cfg.beta2.powf(t);

    for (k, ((_, p), g)) in blocks.iter_mut().zip(grads).enumerate() {
        let m = state.m[k].data_mut();
        let v = state.v[k].data_mut();
        let pd = p.data_mut();
        for i in 0..pd.len() {
            let gi = g.data()[i];
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gi;
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gi * gi;
            let m_hat = m[i] / bc1;
            let v_hat = v[i] / bc2;
            pd[i] -= cfg.lr * m_hat / (v_hat.sqrt() + cfg.eps);
        }
    }
    Ok(())
}
