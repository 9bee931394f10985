//! Parameters of the tagger: two LSTM directions, a dense layer, and the
//! CRF transition matrix.

use super::tags::{NUM_LABELS, NUM_STATES};
use crate::features::TOKEN_DIM;
use crate::rng::Rng;
use crate::tensor::{LstmParams, Tape, Tensor, Value};

/// All trainable state of the tagger plus its two architectural knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct NerParams {
    pub fwd: LstmParams,
    pub bwd: LstmParams,
    /// Dense layer mapping the 2H context vector to label scores.
    pub dense_w: Tensor,
    pub dense_b: Tensor,
    /// `NUM_STATES x NUM_STATES` matrix indexed `[from][to]`, including the
    /// virtual START/END states. The START column and END row stay unused.
    pub transitions: Tensor,
    pub hidden: usize,
    pub dropout: f64,
}

impl NerParams {
    pub fn init(hidden: usize, dropout: f64, rng: &mut Rng) -> Self {
        NerParams {
            fwd: LstmParams::init(TOKEN_DIM, hidden, rng),
            bwd: LstmParams::init(TOKEN_DIM, hidden, rng),
            dense_w: Tensor::glorot(NUM_LABELS, 2 * hidden, rng),
            dense_b: Tensor::zeros(vec![NUM_LABELS]),
            transitions: Tensor::zeros(vec![NUM_STATES, NUM_STATES]),
            hidden,
            dropout,
        }
    }

    /// All-zero parameters, mostly for tests and hand construction.
    pub fn zeros(hidden: usize) -> Self {
        NerParams {
            fwd: LstmParams::zeros(TOKEN_DIM, hidden),
            bwd: LstmParams::zeros(TOKEN_DIM, hidden),
            dense_w: Tensor::zeros(vec![NUM_LABELS, 2 * hidden]),
            dense_b: Tensor::zeros(vec![NUM_LABELS]),
            transitions: Tensor::zeros(vec![NUM_STATES, NUM_STATES]),
            hidden,
            dropout: 0.0,
        }
    }

    /// Parameter blocks with stable names, in the fixed order shared by the
    /// optimizer, the gradient collection, and the bundle format.
    pub fn blocks(&self) -> Vec<(&'static str, &Tensor)> {
        let mut out: Vec<(&'static str, &Tensor)> = Vec::with_capacity(27);
        out.extend(FWD_NAMES.iter().copied().zip(self.fwd.blocks()));
        out.extend(BWD_NAMES.iter().copied().zip(self.bwd.blocks()));
        out.push(("dense_w", &self.dense_w));
        out.push(("dense_b", &self.dense_b));
        out.push(("transitions", &self.transitions));
        out
    }

    pub fn blocks_mut(&mut self) -> Vec<(&'static str, &mut Tensor)> {
        let mut out: Vec<(&'static str, &mut Tensor)> = Vec::with_capacity(27);
        out.extend(FWD_NAMES.iter().copied().zip(self.fwd.blocks_mut()));
        out.extend(BWD_NAMES.iter().copied().zip(self.bwd.blocks_mut()));
        out.push(("dense_w", &mut self.dense_w));
        out.push(("dense_b", &mut self.dense_b));
        out.push(("transitions", &mut self.transitions));
        out
    }

    /// Loads every block onto a tape as differentiable leaves.
    pub fn bind(&self, tape: &mut Tape) -> BoundNer {
        BoundNer {
            fwd: self.fwd.bind(tape),
            bwd: self.bwd.bind(tape),
            dense_w: tape.leaf(self.dense_w.clone()),
            dense_b: tape.leaf(self.dense_b.clone()),
            transitions: tape.leaf(self.transitions.clone()),
            hidden: self.hidden,
            dropout: self.dropout,
        }
    }
}

pub const FWD_NAMES: [&str; 12] = [
    "fwd.wx_i", "fwd.wx_f", "fwd.wx_g", "fwd.wx_o", "fwd.wh_i", "fwd.wh_f", "fwd.wh_g",
    "fwd.wh_o", "fwd.b_i", "fwd.b_f", "fwd.b_g", "fwd.b_o",
];

pub const BWD_NAMES: [&str; 12] = [
    "bwd.wx_i", "bwd.wx_f", "bwd.wx_g", "bwd.wx_o", "bwd.wh_i", "bwd.wh_f", "bwd.wh_g",
    "bwd.wh_o", "bwd.b_i", "bwd.b_f", "bwd.b_g", "bwd.b_o",
];

/// Tape handles for every tagger parameter block.
pub struct BoundNer {
    pub fwd: crate::tensor::BoundLstm,
    pub bwd: crate::tensor::BoundLstm,
    pub dense_w: Value,
    pub dense_b: Value,
    pub transitions: Value,
    pub hidden: usize,
    pub dropout: f64,
}

impl BoundNer {
    /// Leaf handles in [`NerParams::blocks`] order.
    pub fn leaf_values(&self) -> Vec<Value> {
        let mut out = self.fwd.values();
        out.extend(self.bwd.values());
        out.push(self.dense_w);
        out.push(self.dense_b);
        out.push(self.transitions);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_and_leaves_align() {
        let mut rng = Rng::seed(1);
        let p = NerParams::init(3, 0.5, &mut rng);
        let mut tape = Tape::new();
        let bound = p.bind(&mut tape);
        let blocks = p.blocks();
        let leaves = bound.leaf_values();
        assert_eq!(blocks.len(), 27);
        assert_eq!(blocks.len(), leaves.len());
        for ((_, t), v) in blocks.iter().zip(&leaves) {
            assert_eq!(t.shape(), tape.value(*v).shape());
            assert_eq!(t.data(), tape.value(*v).data());
        }
    }

    #[test]
    fn init_shapes() {
        let mut rng = Rng::seed(2);
        let p = NerParams::init(4, 0.5, &mut rng);
        assert_eq!(p.dense_w.shape(), &[NUM_LABELS, 8]);
        assert_eq!(p.transitions.shape(), &[NUM_STATES, NUM_STATES]);
        assert_eq!(p.fwd.input_dim(), TOKEN_DIM);
        // Forget-gate bias starts at +1.
        assert!(p.fwd.b[1].data().iter().all(|&v| v == 1.0));
        assert!(p.fwd.b[0].data().iter().all(|&v| v == 0.0));
    }
}
