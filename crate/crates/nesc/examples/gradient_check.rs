//! Check the tape's gradients against central finite differences.
//!
//! ```bash
//! cargo run -p nesc --example gradient_check
//! ```

use nesc::tensor::{lstm_cell, LstmParams, Tape, Tensor, LSTM_BLOCK_NAMES};
use nesc::Rng;

fn loss_of(params: &LstmParams, x: &[f64]) -> f64 {
    let mut tape = Tape::new();
    let bound = params.bind(&mut tape);
    let xv = tape.leaf(Tensor::vector(x));
    let h0 = tape.leaf(Tensor::zeros(vec![params.hidden_dim()]));
    let c0 = tape.leaf(Tensor::zeros(vec![params.hidden_dim()]));
    let (h, _) = lstm_cell(&mut tape, xv, h0, c0, &bound).expect("shapes conform");
    let s = tape.sum(h);
    tape.item(s)
}

fn main() {
    let mut rng = Rng::seed(11);
    let params = LstmParams::init(6, 4, &mut rng);
    let x: Vec<f64> = (0..6).map(|_| rng.uniform(-1.0, 1.0)).collect();

    // Reverse-mode gradients in one pass.
    let mut tape = Tape::new();
    let bound = params.bind(&mut tape);
    let xv = tape.leaf(Tensor::vector(&x));
    let h0 = tape.leaf(Tensor::zeros(vec![4]));
    let c0 = tape.leaf(Tensor::zeros(vec![4]));
    let (h, _) = lstm_cell(&mut tape, xv, h0, c0, &bound).expect("shapes conform");
    let loss = tape.sum(h);
    let grads = tape.backward(loss).expect("scalar loss");

    println!("sum(h) = {:.6}\n", tape.item(loss));
    println!("{:<8} {:>12} {:>12} {:>10}", "block", "autodiff", "numeric", "rel err");

    let step = 1e-5;
    let mut probe = params.clone();
    for (bi, leaf) in bound.values().iter().enumerate() {
        // Spot-check the first element of each parameter block.
        let ad = grads.get(*leaf).data()[0];
        let orig = probe.blocks()[bi].data()[0];
        probe.blocks_mut()[bi].data_mut()[0] = orig + step;
        let up = loss_of(&probe, &x);
        probe.blocks_mut()[bi].data_mut()[0] = orig - step;
        let down = loss_of(&probe, &x);
        probe.blocks_mut()[bi].data_mut()[0] = orig;
        let fd = (up - down) / (2.0 * step);
        let rel = (ad - fd).abs() / ad.abs().max(fd.abs()).max(1e-12);
        println!("{:<8} {:>12.8} {:>12.8} {:>10.2e}", LSTM_BLOCK_NAMES[bi], ad, fd, rel);
    }
}
