//! Bidirectional LSTM encoder over token vectors.

use super::params::{BoundNer, NerParams};
use crate::error::{Error, Result};
use crate::features::TokenVector;
use crate::rng::Rng;
use crate::tensor::{check_input_dim, lstm_cell, Tape, Tensor, Value};

/// Runs both directions over the sentence and returns one `2H` context
/// value per position: `[forward_h_t | backward_h_t]`.
///
/// With `train_mode` set, inverted dropout is applied to each context
/// vector; evaluation mode is deterministic and leaves `rng` untouched.
pub fn encode_on_tape(
    tape: &mut Tape,
    vectors: &[TokenVector],
    bound: &BoundNer,
    train_mode: bool,
    rng: &mut Rng,
) -> Result<Vec<Value>> {
    if vectors.is_empty() {
        return Err(Error::Usage("encode of an empty sentence".into()));
    }
    let n = vectors.len();
    let hidden = bound.hidden;

    let inputs: Vec<Value> = vectors
        .iter()
        .map(|v| tape.leaf(Tensor::vector(v.values())))
        .collect();

    let mut fwd_h = Vec::with_capacity(n);
    let mut h = tape.leaf(Tensor::zeros(vec![hidden]));
    let mut c = tape.leaf(Tensor::zeros(vec![hidden]));
    for &x in &inputs {
        let (nh, nc) = lstm_cell(tape, x, h, c, &bound.fwd)?;
        fwd_h.push(nh);
        h = nh;
        c = nc;
    }

    let mut bwd_h = vec![None; n];
    let mut h = tape.leaf(Tensor::zeros(vec![hidden]));
    let mut c = tape.leaf(Tensor::zeros(vec![hidden]));
    for t in (0..n).rev() {
        let (nh, nc) = lstm_cell(tape, inputs[t], h, c, &bound.bwd)?;
        bwd_h[t] = Some(nh);
        h = nh;
        c = nc;
    }

    let mut out = Vec::with_capacity(n);
    for t in 0..n {
        let ctx = tape.concat(fwd_h[t], bwd_h[t].expect("filled"))?;
        let ctx = if train_mode && bound.dropout > 0.0 {
            let keep = 1.0 - bound.dropout;
            let mask: Vec<f64> = (0..2 * hidden)
                .map(|_| if rng.bernoulli(keep) { 1.0 / keep } else { 0.0 })
                .collect();
            tape.mask_mul(ctx, Tensor::vector(&mask))?
        } else {
            ctx
        };
        out.push(ctx);
    }
    Ok(out)
}

/// Encoder as plain values: featurized sentence in, `2H` vectors out.
pub fn encode(
    vectors: &[TokenVector],
    params: &NerParams,
    train_mode: bool,
    rng: &mut Rng,
) -> Result<Vec<Vec<f64>>> {
    if let Some(v) = vectors.first() {
        check_input_dim(&params.fwd, &Tensor::vector(v.values()))?;
    }
    let mut tape = Tape::new();
    let bound = params.bind(&mut tape);
    let out = encode_on_tape(&mut tape, vectors, &bound, train_mode, rng)?;
    Ok(out
        .into_iter()
        .map(|v| tape.value(v).data().to_vec())
        .collect())
}

/// Per-token label log-probabilities from a context value.
pub fn emissions_on_tape(tape: &mut Tape, ctx: Value, bound: &BoundNer) -> Result<Value> {
    let logits = tape.affine(bound.dense_w, ctx, bound.dense_b)?;
    tape.log_softmax(logits)
}

/// Label log-probabilities for one plain context vector.
pub fn emissions(ctx: &[f64], params: &NerParams) -> Result<Vec<f64>> {
    let mut tape = Tape::new();
    let bound = params.bind(&mut tape);
    let c = tape.leaf(Tensor::vector(ctx));
    let e = emissions_on_tape(&mut tape, c, &bound)?;
    Ok(tape.value(e).data().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{vectorize, EmbeddingTable, PosTag, Token};
    use crate::ner::tags::NUM_LABELS;

    fn toy_vectors(words: &[&str], rng: &mut Rng) -> Vec<TokenVector> {
        let table = EmbeddingTable::random(words, rng);
        words
            .iter()
            .map(|w| vectorize(&Token::from_surface(*w, PosTag::NOUN), &table).unwrap())
            .collect()
    }

    #[test]
    fn single_token_output_shape() {
        let mut rng = Rng::seed(3);
        let vs = toy_vectors(&["hi"], &mut rng);
        let params = NerParams::init(5, 0.5, &mut rng);
        let out = encode(&vs, &params, false, &mut rng).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].len(), 10);
    }

    #[test]
    fn empty_sentence_is_a_usage_error() {
        let mut rng = Rng::seed(3);
        let params = NerParams::init(4, 0.5, &mut rng);
        assert!(matches!(
            encode(&[], &params, false, &mut rng),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn zero_params_give_zero_outputs() {
        let mut rng = Rng::seed(4);
        let vs = toy_vectors(&["a", "b", "c"], &mut rng);
        let params = NerParams::zeros(6);
        let out = encode(&vs, &params, false, &mut rng).unwrap();
        assert!(out.iter().all(|v| v.iter().all(|&x| x == 0.0)));
    }

    #[test]
    fn reversed_input_with_swapped_directions_mirrors_output() {
        let mut rng = Rng::seed(5);
        let vs = toy_vectors(&["a", "b", "c", "d"], &mut rng);
        let params = NerParams::init(4, 0.0, &mut rng);

        let mut swapped = params.clone();
        std::mem::swap(&mut swapped.fwd, &mut swapped.bwd);

        let fwd_out = encode(&vs, &params, false, &mut rng).unwrap();
        let rev_vs: Vec<TokenVector> = vs.iter().rev().cloned().collect();
        let rev_out = encode(&rev_vs, &swapped, false, &mut rng).unwrap();

        let h = params.hidden;
        let n = vs.len();
        for t in 0..n {
            let mirrored = &rev_out[n - 1 - t];
            // Halves swap along with the directions.
            assert_eq!(&fwd_out[t][..h], &mirrored[h..]);
            assert_eq!(&fwd_out[t][h..], &mirrored[..h]);
        }
    }

    #[test]
    fn eval_mode_is_deterministic_and_ignores_rng() {
        let mut rng = Rng::seed(6);
        let vs = toy_vectors(&["x", "y"], &mut rng);
        let params = NerParams::init(3, 0.5, &mut rng);
        let mut r1 = Rng::seed(100);
        let mut r2 = Rng::seed(999);
        let a = encode(&vs, &params, false, &mut r1).unwrap();
        let b = encode(&vs, &params, false, &mut r2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn train_mode_dropout_differs_from_eval() {
        let mut rng = Rng::seed(7);
        let vs = toy_vectors(&["x", "y", "z"], &mut rng);
        let params = NerParams::init(8, 0.5, &mut rng);
        let eval = encode(&vs, &params, false, &mut rng).unwrap();
        let train = encode(&vs, &params, true, &mut rng).unwrap();
        assert_ne!(eval, train);
    }

    #[test]
    fn zero_context_uniform_emissions() {
        let params = NerParams::zeros(4);
        let e = emissions(&[0.0; 8], &params).unwrap();
        let expect = -(NUM_LABELS as f64).ln();
        for v in e {
            assert!((v - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn emission_probabilities_sum_to_one() {
        let mut rng = Rng::seed(8);
        let params = NerParams::init(4, 0.5, &mut rng);
        let ctx: Vec<f64> = (0..8).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let e = emissions(&ctx, &params).unwrap();
        let total: f64 = e.iter().map(|v| v.exp()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn emissions_invariant_to_constant_bias_shift() {
        let mut rng = Rng::seed(9);
        let mut params = NerParams::init(4, 0.5, &mut rng);
        let ctx: Vec<f64> = (0..8).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let before = emissions(&ctx, &params).unwrap();
        for v in params.dense_b.data_mut() {
            *v += 3.25;
        }
        let after = emissions(&ctx, &params).unwrap();
        for (a, b) in before.iter().zip(&after) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
