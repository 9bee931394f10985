//! The binary classification head: an LSTM over the window slice, final
//! hidden state through a dense layer and a two-way softmax.

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::tensor::{lstm_cell, BoundLstm, LstmParams, Tape, Tensor, Value};

/// Index of the "is an entity" class in the head's two logits.
pub const POSITIVE_CLASS: usize = 1;

/// Trainable state of the span classifier plus the window size it expects
/// and the class weights it was trained with.
#[derive(Debug, Clone, PartialEq)]
pub struct NescParams {
    pub head: LstmParams,
    pub dense_w: Tensor,
    pub dense_b: Tensor,
    /// Context size `k` used when building windows.
    pub context_size: usize,
    pub w_pos: f64,
    pub w_neg: f64,
}

impl NescParams {
    /// `input` is the encoder output width (2H); `hidden` is the head size.
    pub fn init(
        input: usize,
        hidden: usize,
        context_size: usize,
        w_pos: f64,
        w_neg: f64,
        rng: &mut Rng,
    ) -> Self {
        NescParams {
            head: LstmParams::init(input, hidden, rng),
            dense_w: Tensor::glorot(2, hidden, rng),
            dense_b: Tensor::zeros(vec![2]),
            context_size,
            w_pos,
            w_neg,
        }
    }

    pub fn zeros(input: usize, hidden: usize, context_size: usize) -> Self {
        NescParams {
            head: LstmParams::zeros(input, hidden),
            dense_w: Tensor::zeros(vec![2, hidden]),
            dense_b: Tensor::zeros(vec![2]),
            context_size,
            w_pos: 1.0,
            w_neg: 1.0,
        }
    }

    pub fn blocks(&self) -> Vec<(&'static str, &Tensor)> {
        let mut out: Vec<(&'static str, &Tensor)> = Vec::with_capacity(14);
        out.extend(HEAD_NAMES.iter().copied().zip(self.head.blocks()));
        out.push(("head.dense_w", &self.dense_w));
        out.push(("head.dense_b", &self.dense_b));
        out
    }

    pub fn blocks_mut(&mut self) -> Vec<(&'static str, &mut Tensor)> {
        let mut out: Vec<(&'static str, &mut Tensor)> = Vec::with_capacity(14);
        out.extend(HEAD_NAMES.iter().copied().zip(self.head.blocks_mut()));
        out.push(("head.dense_w", &mut self.dense_w));
        out.push(("head.dense_b", &mut self.dense_b));
        out
    }

    pub fn bind(&self, tape: &mut Tape) -> BoundNesc {
        BoundNesc {
            head: self.head.bind(tape),
            dense_w: tape.leaf(self.dense_w.clone()),
            dense_b: tape.leaf(self.dense_b.clone()),
        }
    }
}

pub const HEAD_NAMES: [&str; 12] = [
    "head.wx_i", "head.wx_f", "head.wx_g", "head.wx_o", "head.wh_i", "head.wh_f", "head.wh_g",
    "head.wh_o", "head.b_i", "head.b_f", "head.b_g", "head.b_o",
];

/// Tape handles for the head parameters.
pub struct BoundNesc {
    pub head: BoundLstm,
    pub dense_w: Value,
    pub dense_b: Value,
}

impl BoundNesc {
    pub fn leaf_values(&self) -> Vec<Value> {
        let mut out = self.head.values();
        out.push(self.dense_w);
        out.push(self.dense_b);
        out
    }
}

/// Runs the head over window-slice values already on the tape and returns
/// the two-way log-probabilities.
pub fn head_log_probs_on_tape(
    tape: &mut Tape,
    slice: &[Value],
    hidden: usize,
    bound: &BoundNesc,
) -> Result<Value> {
    if slice.is_empty() {
        return Err(Error::Usage("span classifier got an empty window".into()));
    }
    let mut h = tape.leaf(Tensor::zeros(vec![hidden]));
    let mut c = tape.leaf(Tensor::zeros(vec![hidden]));
    for &x in slice {
        let (nh, nc) = lstm_cell(tape, x, h, c, &bound.head)?;
        h = nh;
        c = nc;
    }
    let logits = tape.affine(bound.dense_w, h, bound.dense_b)?;
    tape.log_softmax(logits)
}

/// Probability that the window's central span is an entity. Deterministic,
/// no dropout anywhere in the head.
pub fn nesc_score(slice: &[Vec<f64>], params: &NescParams) -> Result<f64> {
    let mut tape = Tape::new();
    let bound = params.bind(&mut tape);
    let slice_values: Vec<Value> = slice
        .iter()
        .map(|v| tape.leaf(Tensor::vector(v)))
        .collect();
    let log_probs =
        head_log_probs_on_tape(&mut tape, &slice_values, params.head.hidden_dim(), &bound)?;
    Ok(tape.value(log_probs).data()[POSITIVE_CLASS].exp())
}

/// Weighted binary cross-entropy on a probability, with the probability
/// clamped away from 0 and 1.
pub fn weighted_ce(p: f64, target: bool, w_pos: f64, w_neg: f64) -> f64 {
    let p = p.clamp(1e-12, 1.0 - 1e-12);
    if target {
        -w_pos * p.ln()
    } else {
        -w_neg * (1.0 - p).ln()
    }
}
