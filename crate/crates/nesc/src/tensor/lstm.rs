//! Single LSTM cell step, recorded on the tape.

use super::tape::{Tape, Value};
use super::Tensor;
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Gate order used throughout: input, forget, candidate, output.
pub const GATES: usize = 4;

/// Weights for one LSTM direction: per gate, an input matrix `wx` (H x D),
/// a recurrent matrix `wh` (H x H), and a bias (H).
#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams {
    pub wx: [Tensor; GATES],
    pub wh: [Tensor; GATES],
    pub b: [Tensor; GATES],
}

impl LstmParams {
    /// Glorot-uniform weights, zero biases, forget-gate bias +1.
    pub fn init(input: usize, hidden: usize, rng: &mut Rng) -> Self {
        let wx = std::array::from_fn(|_| Tensor::glorot(hidden, input, rng));
        let wh = std::array::from_fn(|_| Tensor::glorot(hidden, hidden, rng));
        let mut b: [Tensor; GATES] = std::array::from_fn(|_| Tensor::zeros(vec![hidden]));
        for v in b[1].data_mut() {
            *v = 1.0;
        }
        LstmParams { wx, wh, b }
    }

    pub fn zeros(input: usize, hidden: usize) -> Self {
        LstmParams {
            wx: std::array::from_fn(|_| Tensor::zeros(vec![hidden, input])),
            wh: std::array::from_fn(|_| Tensor::zeros(vec![hidden, hidden])),
            b: std::array::from_fn(|_| Tensor::zeros(vec![hidden])),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.wx[0].cols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.wx[0].rows()
    }

    /// Parameter blocks in a fixed order, for optimizer and persistence use.
    pub fn blocks(&self) -> Vec<&Tensor> {
        let mut out = Vec::with_capacity(3 * GATES);
        out.extend(self.wx.iter());
        out.extend(self.wh.iter());
        out.extend(self.b.iter());
        out
    }

    pub fn blocks_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out: Vec<&mut Tensor> = Vec::with_capacity(3 * GATES);
        out.extend(self.wx.iter_mut());
        out.extend(self.wh.iter_mut());
        out.extend(self.b.iter_mut());
        out
    }

    /// Loads all blocks onto a tape as differentiable leaves.
    pub fn bind(&self, tape: &mut Tape) -> BoundLstm {
        BoundLstm {
            wx: std::array::from_fn(|k| tape.leaf(self.wx[k].clone())),
            wh: std::array::from_fn(|k| tape.leaf(self.wh[k].clone())),
            b: std::array::from_fn(|k| tape.leaf(self.b[k].clone())),
        }
    }
}

/// Block suffix names matching [`LstmParams::blocks`] order.
pub const LSTM_BLOCK_NAMES: [&str; 12] = [
    "wx_i", "wx_f", "wx_g", "wx_o", "wh_i", "wh_f", "wh_g", "wh_o", "b_i", "b_f", "b_g", "b_o",
];

/// Tape handles for one direction's parameters.
#[derive(Debug, Clone)]
pub struct BoundLstm {
    pub wx: [Value; GATES],
    pub wh: [Value; GATES],
    pub b: [Value; GATES],
}

impl BoundLstm {
    pub fn values(&self) -> Vec<Value> {
        let mut out = Vec::with_capacity(3 * GATES);
        out.extend(self.wx.iter().copied());
        out.extend(self.wh.iter().copied());
        out.extend(self.b.iter().copied());
        out
    }
}

/// One step of the standard LSTM recurrence.
///
/// Gates use the sigmoid, the candidate and the output squashing use tanh:
/// `c = f*c_prev + i*g`, `h = o*tanh(c)`.
pub fn lstm_cell(
    tape: &mut Tape,
    x: Value,
    h_prev: Value,
    c_prev: Value,
    p: &BoundLstm,
) -> Result<(Value, Value)> {
    let pre: Vec<Value> = (0..GATES)
        .map(|k| {
            let from_x = tape.affine(p.wx[k], x, p.b[k])?;
            let from_h = tape.matvec(p.wh[k], h_prev)?;
            tape.add(from_x, from_h)
        })
        .collect::<Result<_>>()?;
    let i = tape.sigmoid(pre[0]);
    let f = tape.sigmoid(pre[1]);
    let g = tape.tanh(pre[2]);
    let o = tape.sigmoid(pre[3]);
    let keep = tape.mul(f, c_prev)?;
    let write = tape.mul(i, g)?;
    let c = tape.add(keep, write)?;
    let c_squashed = tape.tanh(c);
    let h = tape.mul(o, c_squashed)?;
    Ok((h, c))
}

/// Validates that an input vector matches the cell's expected width.
pub fn check_input_dim(p: &LstmParams, x: &Tensor) -> Result<()> {
    if x.shape().len() != 1 || x.len() != p.input_dim() {
        return Err(Error::Dimension(format!(
            "lstm input shape {:?} does not match expected [{}]",
            x.shape(),
            p.input_dim()
        )));
    }
    Ok(())
}
