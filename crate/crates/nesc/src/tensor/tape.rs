//! Reverse-mode differentiation over a recorded operation tape.
//!
//! A [`Tape`] is a write-once arena of nodes. Forward passes push nodes and
//! return [`Value`] handles; [`Tape::backward`] walks the arena in reverse
//! and accumulates exact gradients for every node. Node indices are
//! topological by construction, so a single reverse sweep suffices.

use super::Tensor;
use crate::error::{Error, Result};

/// Handle to a node on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Value(usize);

enum Op {
    Leaf,
    /// y = W x + b
    Affine { w: usize, x: usize, b: usize },
    /// y = W x
    MatVec { w: usize, x: usize },
    Add { a: usize, b: usize },
    /// Elementwise product.
    Mul { a: usize, b: usize },
    Sigmoid { x: usize },
    Tanh { x: usize },
    Softmax { x: usize },
    LogSoftmax { x: usize },
    LogSumExp { x: usize },
    Concat { a: usize, b: usize },
    /// Scalar pick from a vector.
    Index { x: usize, i: usize },
    /// Vector from scalars.
    Stack { xs: Vec<usize> },
    Sum { x: usize },
    Scale { x: usize, c: f64 },
    /// Elementwise product with a constant tensor (dropout masks).
    MaskMul { x: usize, mask: Tensor },
    /// Row r of a matrix.
    Row { m: usize, r: usize },
    /// Column c of a matrix.
    Col { m: usize, c: usize },
    /// Contiguous sub-vector.
    Slice { x: usize, start: usize },
}

struct Node {
    value: Tensor,
    op: Op,
}

/// Gradients for every node of a tape, produced by [`Tape::backward`].
pub struct Gradients {
    grads: Vec<Tensor>,
}

impl Gradients {
    pub fn get(&self, v: Value) -> &Tensor {
        &self.grads[v.0]
    }
}

/// Write-once record of a forward computation.
#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

impl Tape {
    pub fn new() -> Self {
        Tape { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Tensor, op: Op) -> Value {
        self.nodes.push(Node { value, op });
        Value(self.nodes.len() - 1)
    }

    /// Records a differentiable input (parameter or activation).
    pub fn leaf(&mut self, t: Tensor) -> Value {
        self.push(t, Op::Leaf)
    }

    pub fn value(&self, v: Value) -> &Tensor {
        &self.nodes[v.0].value
    }

    /// Scalar value of a rank-0 node.
    pub fn item(&self, v: Value) -> f64 {
        self.nodes[v.0].value.item()
    }

    pub fn affine(&mut self, w: Value, x: Value, b: Value) -> Result<Value> {
        let (wt, xt, bt) = (
            &self.nodes[w.0].value,
            &self.nodes[x.0].value,
            &self.nodes[b.0].value,
        );
        if wt.shape().len() != 2 || xt.shape().len() != 1 || bt.shape().len() != 1 {
            return Err(Error::Dimension(format!(
                "affine wants matrix*vector+vector, got {:?} {:?} {:?}",
                wt.shape(),
                xt.shape(),
                bt.shape()
            )));
        }
        let (m, n) = (wt.rows(), wt.cols());
        if xt.len() != n || bt.len() != m {
            return Err(Error::Dimension(format!(
                "affine shapes do not conform: W {:?} vs x {:?}, b {:?}",
                wt.shape(),
                xt.shape(),
                bt.shape()
            )));
        }
        let mut out = bt.data().to_vec();
        let wd = wt.data();
        let xd = xt.data();
        for i in 0..m {
            let row = &wd[i * n..(i + 1) * n];
            let mut acc = 0.0;
            for j in 0..n {
                acc += row[j] * xd[j];
            }
            out[i] += acc;
        }
        Ok(self.push(Tensor::vector(&out), Op::Affine { w: w.0, x: x.0, b: b.0 }))
    }

    pub fn matvec(&mut self, w: Value, x: Value) -> Result<Value> {
        let (wt, xt) = (&self.nodes[w.0].value, &self.nodes[x.0].value);
        if wt.shape().len() != 2 || xt.shape().len() != 1 || xt.len() != wt.cols() {
            return Err(Error::Dimension(format!(
                "matvec shapes do not conform: W {:?} vs x {:?}",
                wt.shape(),
                xt.shape()
            )));
        }
        let (m, n) = (wt.rows(), wt.cols());
        let wd = wt.data();
        let xd = xt.data();
        let mut out = vec![0.0; m];
        for i in 0..m {
            let row = &wd[i * n..(i + 1) * n];
            let mut acc = 0.0;
            for j in 0..n {
                acc += row[j] * xd[j];
            }
            out[i] = acc;
        }
        Ok(self.push(Tensor::vector(&out), Op::MatVec { w: w.0, x: x.0 }))
    }

    pub fn add(&mut self, a: Value, b: Value) -> Result<Value> {
        let (at, bt) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
        if at.shape() != bt.shape() {
            return Err(Error::Dimension(format!(
                "add shapes differ: {:?} vs {:?}",
                at.shape(),
                bt.shape()
            )));
        }
        let data: Vec<f64> = at
            .data()
            .iter()
            .zip(bt.data())
            .map(|(x, y)| x + y)
            .collect();
        let t = Tensor::new(at.shape().to_vec(), data).expect("same shape");
        Ok(self.push(t, Op::Add { a: a.0, b: b.0 }))
    }

    pub fn mul(&mut self, a: Value, b: Value) -> Result<Value> {
        let (at, bt) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
        if at.shape() != bt.shape() {
            return Err(Error::Dimension(format!(
                "mul shapes differ: {:?} vs {:?}",
                at.shape(),
                bt.shape()
            )));
        }
        let data: Vec<f64> = at
            .data()
            .iter()
            .zip(bt.data())
            .map(|(x, y)| x * y)
            .collect();
        let t = Tensor::new(at.shape().to_vec(), data).expect("same shape");
        Ok(self.push(t, Op::Mul { a: a.0, b: b.0 }))
    }

    pub fn sigmoid(&mut self, x: Value) -> Value {
        let data: Vec<f64> = self.nodes[x.0]
            .value
            .data()
            .iter()
            .map(|&v| 1.0 / (1.0 + (-v).exp()))
            .collect();
        let t = Tensor::new(self.nodes[x.0].value.shape().to_vec(), data).expect("same shape");
        self.push(t, Op::Sigmoid { x: x.0 })
    }

    pub fn tanh(&mut self, x: Value) -> Value {
        let data: Vec<f64> = self.nodes[x.0].value.data().iter().map(|v| v.tanh()).collect();
        let t = Tensor::new(self.nodes[x.0].value.shape().to_vec(), data).expect("same shape");
        self.push(t, Op::Tanh { x: x.0 })
    }

    pub fn softmax(&mut self, x: Value) -> Result<Value> {
        let xt = &self.nodes[x.0].value;
        if xt.shape().len() != 1 || xt.is_empty() {
            return Err(Error::Dimension(format!(
                "softmax wants a non-empty vector, got {:?}",
                xt.shape()
            )));
        }
        let p = super::softmax_slice(xt.data())?;
        Ok(self.push(Tensor::vector(&p), Op::Softmax { x: x.0 }))
    }

    pub fn log_softmax(&mut self, x: Value) -> Result<Value> {
        let xt = &self.nodes[x.0].value;
        if xt.shape().len() != 1 || xt.is_empty() {
            return Err(Error::Dimension(format!(
                "log_softmax wants a non-empty vector, got {:?}",
                xt.shape()
            )));
        }
        let lse = super::log_sum_exp_slice(xt.data())?;
        let data: Vec<f64> = xt.data().iter().map(|v| v - lse).collect();
        Ok(self.push(Tensor::vector(&data), Op::LogSoftmax { x: x.0 }))
    }

    pub fn log_sum_exp(&mut self, x: Value) -> Result<Value> {
        let xt = &self.nodes[x.0].value;
        if xt.shape().len() != 1 || xt.is_empty() {
            return Err(Error::Dimension(format!(
                "log_sum_exp wants a non-empty vector, got {:?}",
                xt.shape()
            )));
        }
        let lse = super::log_sum_exp_slice(xt.data())?;
        Ok(self.push(Tensor::scalar(lse), Op::LogSumExp { x: x.0 }))
    }

    pub fn concat(&mut self, a: Value, b: Value) -> Result<Value> {
        let (at, bt) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
        if at.shape().len() != 1 || bt.shape().len() != 1 {
            return Err(Error::Dimension("concat wants two vectors".into()));
        }
        let mut data = at.data().to_vec();
        data.extend_from_slice(bt.data());
        Ok(self.push(Tensor::vector(&data), Op::Concat { a: a.0, b: b.0 }))
    }

    pub fn index(&mut self, x: Value, i: usize) -> Result<Value> {
        let xt = &self.nodes[x.0].value;
        if xt.shape().len() != 1 || i >= xt.len() {
            return Err(Error::Dimension(format!(
                "index {} out of bounds for shape {:?}",
                i,
                xt.shape()
            )));
        }
        let v = xt.data()[i];
        Ok(self.push(Tensor::scalar(v), Op::Index { x: x.0, i }))
    }

    /// Stacks rank-0 values into a vector.
    pub fn stack(&mut self, xs: &[Value]) -> Result<Value> {
        if xs.is_empty() {
            return Err(Error::Dimension("stack of zero values".into()));
        }
        let mut data = Vec::with_capacity(xs.len());
        for v in xs {
            let t = &self.nodes[v.0].value;
            if t.len() != 1 {
                return Err(Error::Dimension("stack wants scalar inputs".into()));
            }
            data.push(t.data()[0]);
        }
        Ok(self.push(
            Tensor::vector(&data),
            Op::Stack {
                xs: xs.iter().map(|v| v.0).collect(),
            },
        ))
    }

    pub fn sum(&mut self, x: Value) -> Value {
        let s: f64 = self.nodes[x.0].value.data().iter().sum();
        self.push(Tensor::scalar(s), Op::Sum { x: x.0 })
    }

    pub fn scale(&mut self, x: Value, c: f64) -> Value {
        let data: Vec<f64> = self.nodes[x.0].value.data().iter().map(|v| v * c).collect();
        let t = Tensor::new(self.nodes[x.0].value.shape().to_vec(), data).expect("same shape");
        self.push(t, Op::Scale { x: x.0, c })
    }

    /// Elementwise product with a constant mask; no gradient flows to the mask.
    pub fn mask_mul(&mut self, x: Value, mask: Tensor) -> Result<Value> {
        let xt = &self.nodes[x.0].value;
        if xt.shape() != mask.shape() {
            return Err(Error::Dimension(format!(
                "mask shape {:?} does not match value shape {:?}",
                mask.shape(),
                xt.shape()
            )));
        }
        let data: Vec<f64> = xt
            .data()
            .iter()
            .zip(mask.data())
            .map(|(x, m)| x * m)
            .collect();
        let t = Tensor::new(xt.shape().to_vec(), data).expect("same shape");
        Ok(self.push(t, Op::MaskMul { x: x.0, mask }))
    }

    pub fn row(&mut self, m: Value, r: usize) -> Result<Value> {
        let mt = &self.nodes[m.0].value;
        if mt.shape().len() != 2 || r >= mt.rows() {
            return Err(Error::Dimension(format!(
                "row {} out of bounds for shape {:?}",
                r,
                mt.shape()
            )));
        }
        let n = mt.cols();
        let data = mt.data()[r * n..(r + 1) * n].to_vec();
        Ok(self.push(Tensor::vector(&data), Op::Row { m: m.0, r }))
    }

    pub fn col(&mut self, m: Value, c: usize) -> Result<Value> {
        let mt = &self.nodes[m.0].value;
        if mt.shape().len() != 2 || c >= mt.cols() {
            return Err(Error::Dimension(format!(
                "col {} out of bounds for shape {:?}",
                c,
                mt.shape()
            )));
        }
        let (rows, cols) = (mt.rows(), mt.cols());
        let data: Vec<f64> = (0..rows).map(|r| mt.data()[r * cols + c]).collect();
        Ok(self.push(Tensor::vector(&data), Op::Col { m: m.0, c }))
    }

    pub fn slice(&mut self, x: Value, start: usize, len: usize) -> Result<Value> {
        let xt = &self.nodes[x.0].value;
        if xt.shape().len() != 1 || start + len > xt.len() {
            return Err(Error::Dimension(format!(
                "slice [{start}, {start}+{len}) out of bounds for shape {:?}",
                xt.shape()
            )));
        }
        let data = xt.data()[start..start + len].to_vec();
        Ok(self.push(Tensor::vector(&data), Op::Slice { x: x.0, start }))
    }

    /// Reverse sweep from a scalar loss. Each call starts from fresh zero
    /// gradients, so repeated calls return the same answer.
    pub fn backward(&self, loss: Value) -> Result<Gradients> {
        let loss_t = &self.nodes[loss.0].value;
        if loss_t.len() != 1 {
            return Err(Error::Usage(format!(
                "backward requires a scalar loss, got shape {:?}",
                loss_t.shape()
            )));
        }
        let mut grads: Vec<Tensor> = self
            .nodes
            .iter()
            .map(|n| Tensor::zeros(n.value.shape().to_vec()))
            .collect();
        grads[loss.0].data_mut()[0] = 1.0;

        for id in (0..=loss.0).rev() {
            let g = std::mem::replace(&mut grads[id], Tensor::zeros(vec![]));
            self.propagate(id, &g, &mut grads);
            grads[id] = g;
        }
        Ok(Gradients { grads })
    }

    #[allow(clippy::needless_range_loop)]
    fn propagate(&self, id: usize, g: &Tensor, grads: &mut [Tensor]) {
        let node = &self.nodes[id];
        let gd = g.data();
        match &node.op {
            Op::Leaf => {}
            Op::Affine { w, x, b } => {
                let (wt, xt) = (&self.nodes[*w].value, &self.nodes[*x].value);
                let (m, n) = (wt.rows(), wt.cols());
                {
                    let dw = grads[*w].data_mut();
                    for i in 0..m {
                        let gi = gd[i];
                        if gi != 0.0 {
                            let row = &mut dw[i * n..(i + 1) * n];
                            for (j, r) in row.iter_mut().enumerate() {
                                *r += gi * xt.data()[j];
                            }
                        }
                    }
                }
                {
                    let dx = grads[*x].data_mut();
                    for i in 0..m {
                        let gi = gd[i];
                        if gi != 0.0 {
                            let row = &wt.data()[i * n..(i + 1) * n];
                            for j in 0..n {
                                dx[j] += row[j] * gi;
                            }
                        }
                    }
                }
                {
                    let db = grads[*b].data_mut();
                    for i in 0..m {
                        db[i] += gd[i];
                    }
                }
            }
            Op::MatVec { w, x } => {
                let (wt, xt) = (&self.nodes[*w].value, &self.nodes[*x].value);
                let (m, n) = (wt.rows(), wt.cols());
                {
                    let dw = grads[*w].data_mut();
                    for i in 0..m {
                        let gi = gd[i];
                        if gi != 0.0 {
                            let row = &mut dw[i * n..(i + 1) * n];
                            for (j, r) in row.iter_mut().enumerate() {
                                *r += gi * xt.data()[j];
                            }
                        }
                    }
                }
                {
                    let dx = grads[*x].data_mut();
                    for i in 0..m {
                        let gi = gd[i];
                        if gi != 0.0 {
                            let row = &wt.data()[i * n..(i + 1) * n];
                            for j in 0..n {
                                dx[j] += row[j] * gi;
                            }
                        }
                    }
                }
            }
            Op::Add { a, b } => {
                for (d, &gi) in grads[*a].data_mut().iter_mut().zip(gd) {
                    *d += gi;
                }
                for (d, &gi) in grads[*b].data_mut().iter_mut().zip(gd) {
                    *d += gi;
                }
            }
            Op::Mul { a, b } => {
                let bt = self.nodes[*b].value.data().to_vec();
                let at = self.nodes[*a].value.data().to_vec();
                for ((d, &gi), bv) in grads[*a].data_mut().iter_mut().zip(gd).zip(&bt) {
                    *d += gi * bv;
                }
                for ((d, &gi), av) in grads[*b].data_mut().iter_mut().zip(gd).zip(&at) {
                    *d += gi * av;
                }
            }
            Op::Sigmoid { x } => {
                let y = node.value.data();
                for (i, d) in grads[*x].data_mut().iter_mut().enumerate() {
                    *d += gd[i] * y[i] * (1.0 - y[i]);
                }
            }
            Op::Tanh { x } => {
                let y = node.value.data();
                for (i, d) in grads[*x].data_mut().iter_mut().enumerate() {
                    *d += gd[i] * (1.0 - y[i] * y[i]);
                }
            }
            Op::Softmax { x } => {
                let y = node.value.data();
                let dot: f64 = gd.iter().zip(y).map(|(gi, yi)| gi * yi).sum();
                for (i, d) in grads[*x].data_mut().iter_mut().enumerate() {
                    *d += y[i] * (gd[i] - dot);
                }
            }
            Op::LogSoftmax { x } => {
                let y = node.value.data();
                let gsum: f64 = gd.iter().sum();
                for (i, d) in grads[*x].data_mut().iter_mut().enumerate() {
                    *d += gd[i] - y[i].exp() * gsum;
                }
            }
            Op::LogSumExp { x } => {
                let xt = self.nodes[*x].value.data();
                let lse = node.value.item();
                let g0 = gd[0];
                for (i, d) in grads[*x].data_mut().iter_mut().enumerate() {
                    *d += g0 * (xt[i] - lse).exp();
                }
            }
            Op::Concat { a, b } => {
                let na = self.nodes[*a].value.len();
                for (d, &gi) in grads[*a].data_mut().iter_mut().zip(&gd[..na]) {
                    *d += gi;
                }
                for (d, &gi) in grads[*b].data_mut().iter_mut().zip(&gd[na..]) {
                    *d += gi;
                }
            }
            Op::Index { x, i } => {
                grads[*x].data_mut()[*i] += gd[0];
            }
            Op::Stack { xs } => {
                for (k, xid) in xs.iter().enumerate() {
                    grads[*xid].data_mut()[0] += gd[k];
                }
            }
            Op::Sum { x } => {
                let g0 = gd[0];
                for d in grads[*x].data_mut() {
                    *d += g0;
                }
            }
            Op::Scale { x, c } => {
                for (d, &gi) in grads[*x].data_mut().iter_mut().zip(gd) {
                    *d += c * gi;
                }
            }
            Op::MaskMul { x, mask } => {
                for ((d, &gi), m) in grads[*x].data_mut().iter_mut().zip(gd).zip(mask.data()) {
                    *d += gi * m;
                }
            }
            Op::Row { m, r } => {
                let n = self.nodes[*m].value.cols();
                let dm = grads[*m].data_mut();
                for (j, &gi) in gd.iter().enumerate() {
                    dm[r * n + j] += gi;
                }
            }
            Op::Col { m, c } => {
                let n = self.nodes[*m].value.cols();
                let dm = grads[*m].data_mut();
                for (r, &gi) in gd.iter().enumerate() {
                    dm[r * n + c] += gi;
                }
            }
            Op::Slice { x, start } => {
                let dx = grads[*x].data_mut();
                for (j, &gi) in gd.iter().enumerate() {
                    dx[start + j] += gi;
                }
            }
        }
    }
}
