//! End-to-end span scoring: featurize, encode, slice, classify, calibrate.

use super::head::{nesc_score, NescParams};
use super::window::{context_window, window_slice};
use crate::calibration::{calibrate, IsotonicCalibrator};
use crate::error::Result;
use crate::features::{vectorize_sentence, EmbeddingTable, Token};
use crate::ner::{encode, NerParams};
use crate::rng::Rng;

/// Probability that `span` (inclusive token range) of the sentence is an
/// entity. Runs the full pipeline; deterministic for fixed inputs.
pub fn score_span(
    tokens: &[Token],
    span: (usize, usize),
    table: &EmbeddingTable,
    ner: &NerParams,
    nesc: &NescParams,
    calibrator: Option<&IsotonicCalibrator>,
) -> Result<f64> {
    let vectors = vectorize_sentence(tokens, table)?;
    let mut rng = Rng::seed(0);
    let contexts = encode(&vectors, ner, false, &mut rng)?;
    score_span_encoded(&contexts, span, nesc, calibrator)
}

/// Same scoring against encoder outputs that were computed once for the
/// sentence, for callers scoring many spans.
pub fn score_span_encoded(
    contexts: &[Vec<f64>],
    span: (usize, usize),
    nesc: &NescParams,
    calibrator: Option<&IsotonicCalibrator>,
) -> Result<f64> {
    let window = context_window(span.0, span.1, nesc.context_size, contexts.len())?;
    let slice = window_slice(contexts, &window)?;
    let raw = nesc_score(&slice, nesc)?;
    Ok(match calibrator {
        Some(cal) => calibrate(raw, cal),
        None => raw,
    })
}
