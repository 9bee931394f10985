//! Linear-chain CRF: sequence negative log-likelihood and Viterbi decoding.
//!
//! Path score = sum of per-token emission scores plus transition scores,
//! including the virtual START -> first and last -> END transitions. The
//! partition function runs the forward algorithm in log space.

use super::tags::{Label, END, NUM_LABELS, START};
use crate::error::{Error, Result};
use crate::tensor::{Tape, Tensor, Value};

/// Negative log-likelihood of the gold path, differentiable through both
/// the emissions and the transition matrix.
pub fn crf_nll_on_tape(
    tape: &mut Tape,
    emissions: &[Value],
    transitions: Value,
    gold: &[Label],
) -> Result<Value> {
    if emissions.is_empty() {
        return Err(Error::Usage("crf_nll of an empty sequence".into()));
    }
    if emissions.len() != gold.len() {
        return Err(Error::Usage(format!(
            "crf_nll: {} emission rows vs {} gold labels",
            emissions.len(),
            gold.len()
        )));
    }

    // Score of the gold path.
    let start_row = tape.row(transitions, START)?;
    let mut score = tape.index(start_row, gold[0].index())?;
    for (t, label) in gold.iter().enumerate() {
        let e = tape.index(emissions[t], label.index())?;
        score = tape.add(score, e)?;
        if t + 1 < gold.len() {
            let row = tape.row(transitions, label.index())?;
            let tr = tape.index(row, gold[t + 1].index())?;
            score = tape.add(score, tr)?;
        }
    }
    let last_row = tape.row(transitions, gold[gold.len() - 1].index())?;
    let to_end = tape.index(last_row, END)?;
    score = tape.add(score, to_end)?;

    // Forward algorithm over all paths.
    let start_scores = tape.row(transitions, START)?;
    let start_scores = tape.slice(start_scores, 0, NUM_LABELS)?;
    let mut alpha = tape.add(start_scores, emissions[0])?;
    for emission in emissions.iter().skip(1) {
        let mut next = Vec::with_capacity(NUM_LABELS);
        for j in 0..NUM_LABELS {
            let into_j = tape.col(transitions, j)?;
            let into_j = tape.slice(into_j, 0, NUM_LABELS)?;
            let scores = tape.add(alpha, into_j)?;
            next.push(tape.log_sum_exp(scores)?);
        }
        let stacked = tape.stack(&next)?;
        alpha = tape.add(stacked, *emission)?;
    }
    let to_end = tape.col(transitions, END)?;
    let to_end = tape.slice(to_end, 0, NUM_LABELS)?;
    let final_scores = tape.add(alpha, to_end)?;
    let log_z = tape.log_sum_exp(final_scores)?;

    let neg_score = tape.scale(score, -1.0);
    tape.add(log_z, neg_score)
}

/// Plain-value wrapper around [`crf_nll_on_tape`].
pub fn crf_nll(emissions: &[Vec<f64>], transitions: &Tensor, gold: &[Label]) -> Result<f64> {
    let mut tape = Tape::new();
    let trans = tape.leaf(transitions.clone());
    let em: Vec<Value> = emissions
        .iter()
        .map(|e| tape.leaf(Tensor::vector(e)))
        .collect();
    let loss = crf_nll_on_tape(&mut tape, &em, trans, gold)?;
    Ok(tape.item(loss))
}

/// Highest-scoring label path and its score (START/END transitions
/// included). Ties break toward the lowest label index at each backtrack
/// step.
#[allow(clippy::needless_range_loop)]
pub fn viterbi(emissions: &[Vec<f64>], transitions: &Tensor) -> Result<(Vec<Label>, f64)> {
    if emissions.is_empty() {
        return Err(Error::Usage("viterbi of an empty sequence".into()));
    }
    for e in emissions {
        if e.len() != NUM_LABELS {
            return Err(Error::Dimension(format!(
                "emission row has {} entries, expected {NUM_LABELS}",
                e.len()
            )));
        }
    }
    let n = emissions.len();
    let mut delta = vec![[0.0f64; NUM_LABELS]; n];
    let mut back = vec![[0usize; NUM_LABELS]; n];
    for j in 0..NUM_LABELS {
        delta[0][j] = transitions.at(START, j) + emissions[0][j];
    }
    for t in 1..n {
        for j in 0..NUM_LABELS {
            let mut best = f64::NEG_INFINITY;
            let mut arg = 0;
            for i in 0..NUM_LABELS {
                let s = delta[t - 1][i] + transitions.at(i, j);
                if s > best {
                    best = s;
                    arg = i;
                }
            }
            delta[t][j] = best + emissions[t][j];
            back[t][j] = arg;
        }
    }
    let mut best = f64::NEG_INFINITY;
    let mut arg = 0;
    for j in 0..NUM_LABELS {
        let s = delta[n - 1][j] + transitions.at(j, END);
        if s > best {
            best = s;
            arg = j;
        }
    }
    let mut path = vec![0usize; n];
    path[n - 1] = arg;
    for t in (1..n).rev() {
        path[t - 1] = back[t][path[t]];
    }
    let labels = path
        .into_iter()
        .map(|i| Label::from_index(i).expect("in range"))
        .collect();
    Ok((labels, best))
}

/// Score of one explicit path, shared by decode checks and tests.
pub fn path_score(emissions: &[Vec<f64>], transitions: &Tensor, path: &[Label]) -> f64 {
    let mut s = transitions.at(START, path[0].index());
    for (t, l) in path.iter().enumerate() {
        s += emissions[t][l.index()];
        if t + 1 < path.len() {
            s += transitions.at(l.index(), path[t + 1].index());
        }
    }
    s + transitions.at(path[path.len() - 1].index(), END)
}
