//! Inference: decoded spans plus the per-token probability table.

use super::crf::viterbi;
use super::encoder::{emissions, encode};
use super::params::NerParams;
use super::spans::{decode_spans, EntitySpan};
use super::tags::Label;
use crate::error::Result;
use crate::features::{vectorize_sentence, EmbeddingTable, Token, TokenVector};
use crate::rng::Rng;

/// Everything `tag` produces for one sentence.
#[derive(Debug, Clone)]
pub struct TagOutput {
    pub spans: Vec<EntitySpan>,
    pub labels: Vec<Label>,
    /// One 11-way probability distribution per token (softmax of the dense
    /// layer), kept for diagnostics; the labels come from the CRF decode.
    pub probabilities: Vec<Vec<f64>>,
    /// Encoder outputs, reusable for span scoring.
    pub contexts: Vec<Vec<f64>>,
}

/// Tags a featurized sentence. An empty sentence produces empty outputs.
pub fn tag_vectors(vectors: &[TokenVector], params: &NerParams) -> Result<TagOutput> {
    if vectors.is_empty() {
        return Ok(TagOutput {
            spans: Vec::new(),
            labels: Vec::new(),
            probabilities: Vec::new(),
            contexts: Vec::new(),
        });
    }
    // Inference never draws randomness; the seed value is irrelevant.
    let mut rng = Rng::seed(0);
    let contexts = encode(vectors, params, false, &mut rng)?;
    let mut emission_rows = Vec::with_capacity(contexts.len());
    let mut probabilities = Vec::with_capacity(contexts.len());
    for ctx in &contexts {
        let log_probs = emissions(ctx, params)?;
        probabilities.push(log_probs.iter().map(|v| v.exp()).collect());
        emission_rows.push(log_probs);
    }
    let (labels, _) = viterbi(&emission_rows, &params.transitions)?;
    let spans = decode_spans(&labels);
    Ok(TagOutput {
        spans,
        labels,
        probabilities,
        contexts,
    })
}

/// Tags raw tokens, featurizing against the given embedding table.
pub fn tag(tokens: &[Token], table: &EmbeddingTable, params: &NerParams) -> Result<TagOutput> {
    let vectors = vectorize_sentence(tokens, table)?;
    tag_vectors(&vectors, params)
}
