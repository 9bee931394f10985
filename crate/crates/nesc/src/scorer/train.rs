//! Head training over a frozen encoder.
//!
//! Encoder outputs are computed once per sentence in evaluation mode and
//! treated as constants; only the head parameters receive updates.

use super::head::{head_log_probs_on_tape, NescParams, POSITIVE_CLASS};
use super::window::{context_window, window_slice};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::features::EmbeddingTable;
use crate::ner::{encode, NerParams};
use crate::rng::Rng;
use crate::sampling::NescDataset;
use crate::tensor::{adam_step, clip_global_norm, AdamConfig, AdamState, Tape, Tensor, Value};

/// Hyperparameters for span-classifier training.
#[derive(Debug, Clone)]
pub struct NescTrainConfig {
    /// Head hidden size G.
    pub hidden: usize,
    /// Context size k; must match the dataset's.
    pub context_size: usize,
    pub epochs: usize,
    pub adam: AdamConfig,
    pub clip_norm: f64,
}

impl Default for NescTrainConfig {
    fn default() -> Self {
        NescTrainConfig {
            hidden: 100,
            context_size: 2,
            epochs: 30,
            adam: AdamConfig::default(),
            clip_norm: 5.0,
        }
    }
}

/// A window slice with its binary target, the head's native training unit.
#[derive(Debug, Clone)]
pub struct HeadSample {
    pub slice: Vec<Vec<f64>>,
    pub target: bool,
}

/// Output of head training.
#[derive(Debug, Clone)]
pub struct NescTrainResult {
    pub params: NescParams,
    pub epoch_losses: Vec<f64>,
}

/// Trains the head directly on window slices. This is the core loop that
/// [`train_nesc`] drives after slicing the frozen encoder's outputs.
pub fn train_head(
    samples: &[HeadSample],
    w_pos: f64,
    w_neg: f64,
    config: &NescTrainConfig,
    rng: &mut Rng,
) -> Result<NescTrainResult> {
    if samples.is_empty() {
        return Err(Error::Data("no samples to train the span classifier".into()));
    }
    if w_pos <= 0.0 || w_neg <= 0.0 {
        return Err(Error::Usage("class weights must be positive".into()));
    }
    let input = samples[0]
        .slice
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::Usage("sample with an empty window".into()))?;

    let mut params = NescParams::init(
        input,
        config.hidden,
        config.context_size,
        w_pos,
        w_neg,
        rng,
    );
    let mut state = {
        let blocks = params.blocks();
        AdamState::new(&blocks.iter().map(|(_, t)| *t).collect::<Vec<_>>())
    };

    let mut epoch_losses = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        let mut total = 0.0;
        for (i, sample) in samples.iter().enumerate() {
            let loss = head_step(sample, &mut params, &mut state, config)?;
            if !loss.is_finite() {
                return Err(Error::Training(format!("non-finite loss at sample {i}")));
            }
            total += loss;
        }
        epoch_losses.push(total / samples.len() as f64);
    }
    Ok(NescTrainResult {
        params,
        epoch_losses,
    })
}

fn head_step(
    sample: &HeadSample,
    params: &mut NescParams,
    state: &mut AdamState,
    config: &NescTrainConfig,
) -> Result<f64> {
    let mut tape = Tape::new();
    let bound = params.bind(&mut tape);
    let slice: Vec<Value> = sample
        .slice
        .iter()
        .map(|v| tape.leaf(Tensor::vector(v)))
        .collect();
    let log_probs = head_log_probs_on_tape(&mut tape, &slice, config.hidden, &bound)?;
    let class = if sample.target { POSITIVE_CLASS } else { 0 };
    let weight = if sample.target {
        params.w_pos
    } else {
        params.w_neg
    };
    let picked = tape.index(log_probs, class)?;
    let loss = tape.scale(picked, -weight);
    let loss_value = tape.item(loss);

    let grads = tape.backward(loss)?;
    let mut grad_blocks: Vec<Tensor> = bound
        .leaf_values()
        .iter()
        .map(|v| grads.get(*v).clone())
        .collect();
    clip_global_norm(&mut grad_blocks, config.clip_norm);
    let mut blocks = params.blocks_mut();
    adam_step(&mut blocks, &grad_blocks, state, &config.adam)?;
    Ok(loss_value)
}

/// Builds window slices for every dataset sample against frozen encoder
/// outputs, then trains the head. The tagger parameters are never touched.
pub fn train_nesc(
    corpus: &Corpus,
    table: &EmbeddingTable,
    dataset: &NescDataset,
    ner: &NerParams,
    config: &NescTrainConfig,
    rng: &mut Rng,
) -> Result<NescTrainResult> {
    if dataset.context_size != config.context_size {
        return Err(Error::Usage(format!(
            "dataset was built for context size {} but training uses {}",
            dataset.context_size, config.context_size
        )));
    }
    let samples = slice_dataset(corpus, table, dataset, ner)?;
    train_head(&samples, dataset.w_pos, dataset.w_neg, config, rng)
}

/// Encodes each sentence once (evaluation mode) and slices out every
/// sample's window.
pub fn slice_dataset(
    corpus: &Corpus,
    table: &EmbeddingTable,
    dataset: &NescDataset,
    ner: &NerParams,
) -> Result<Vec<HeadSample>> {
    let vectors = corpus.vectorize(table)?;
    let mut contexts: Vec<Option<Vec<Vec<f64>>>> = vec![None; corpus.len()];
    // Encoder dropout is off here and no randomness is drawn.
    let mut rng = Rng::seed(0);
    let mut samples = Vec::with_capacity(dataset.samples.len());
    for s in &dataset.samples {
        if s.sentence >= corpus.len() {
            return Err(Error::Usage(format!(
                "sample references sentence {} of a {}-sentence corpus",
                s.sentence,
                corpus.len()
            )));
        }
        if contexts[s.sentence].is_none() {
            contexts[s.sentence] = Some(encode(&vectors[s.sentence], ner, false, &mut rng)?);
        }
        let ctx = contexts[s.sentence].as_ref().expect("just filled");
        let window = context_window(s.start, s.end, dataset.context_size, ctx.len())?;
        samples.push(HeadSample {
            slice: window_slice(ctx, &window)?,
            target: s.target,
        });
    }
    Ok(samples)
}
