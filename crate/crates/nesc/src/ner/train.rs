//! Tagger training: per-sentence Adam steps on the CRF log-likelihood.

use super::crf::crf_nll_on_tape;
use super::encoder::{emissions_on_tape, encode_on_tape};
use super::params::NerParams;
use super::tags::Label;
use crate::error::{Error, Result};
use crate::features::TokenVector;
use crate::rng::Rng;
use crate::tensor::{adam_step, clip_global_norm, AdamConfig, AdamState, Tape, Tensor};

/// One featurized training sentence.
#[derive(Debug, Clone)]
pub struct TrainSentence {
    pub vectors: Vec<TokenVector>,
    pub labels: Vec<Label>,
}

/// Hyperparameters for tagger training.
#[derive(Debug, Clone)]
pub struct NerTrainConfig {
    pub hidden: usize,
    pub dropout: f64,
    pub epochs: usize,
    pub adam: AdamConfig,
    pub clip_norm: f64,
}

impl Default for NerTrainConfig {
    fn default() -> Self {
        NerTrainConfig {
            hidden: 100,
            dropout: 0.5,
            epochs: 30,
            adam: AdamConfig::default(),
            clip_norm: 5.0,
        }
    }
}

/// Output of a training run: the parameters plus mean loss per epoch.
#[derive(Debug, Clone)]
pub struct NerTrainResult {
    pub params: NerParams,
    pub epoch_losses: Vec<f64>,
}

/// Trains a tagger from scratch. Deterministic given the seed behind `rng`;
/// sentences are visited in corpus order, one Adam step each.
pub fn train_ner(
    corpus: &[TrainSentence],
    config: &NerTrainConfig,
    rng: &mut Rng,
) -> Result<NerTrainResult> {
    if corpus.is_empty() {
        return Err(Error::Data("training corpus is empty".into()));
    }
    for (i, s) in corpus.iter().enumerate() {
        if s.vectors.is_empty() || s.vectors.len() != s.labels.len() {
            return Err(Error::Data(format!(
                "sentence {i}: {} vectors vs {} labels",
                s.vectors.len(),
                s.labels.len()
            )));
        }
    }

    let mut params = NerParams::init(config.hidden, config.dropout, rng);
    let mut state = {
        let blocks = params.blocks();
        AdamState::new(&blocks.iter().map(|(_, t)| *t).collect::<Vec<_>>())
    };

    let mut epoch_losses = Vec::with_capacity(config.epochs);
    for _epoch in 0..config.epochs {
        let mut total = 0.0;
        for (si, sentence) in corpus.iter().enumerate() {
            let loss = sentence_step(sentence, &mut params, &mut state, config, rng)
                .map_err(|e| match e {
                    Error::Training(msg) => Error::Training(format!("sentence {si}: {msg}")),
                    other => other,
                })?;
            if !loss.is_finite() {
                return Err(Error::Training(format!(
                    "non-finite loss at sentence {si}"
                )));
            }
            total += loss;
        }
        epoch_losses.push(total / corpus.len() as f64);
    }

    Ok(NerTrainResult {
        params,
        epoch_losses,
    })
}

/// Forward, backward, clip, and Adam update for one sentence. Returns the
/// loss value before the update.
fn sentence_step(
    sentence: &TrainSentence,
    params: &mut NerParams,
    state: &mut AdamState,
    config: &NerTrainConfig,
    rng: &mut Rng,
) -> Result<f64> {
    let mut tape = Tape::new();
    let bound = params.bind(&mut tape);
    let contexts = encode_on_tape(&mut tape, &sentence.vectors, &bound, true, rng)?;
    let emissions: Vec<_> = contexts
        .into_iter()
        .map(|c| emissions_on_tape(&mut tape, c, &bound))
        .collect::<Result<_>>()?;
    let loss = crf_nll_on_tape(&mut tape, &emissions, bound.transitions, &sentence.labels)?;
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{vectorize, EmbeddingTable, PosTag, Token};
    use crate::ner::spans::spans_to_labels;
    use crate::ner::spans::EntitySpan;
    use crate::ner::tags::EntityType;

    fn tiny_corpus(rng: &mut Rng) -> Vec<TrainSentence> {
        let table = EmbeddingTable::random(&["alice", "met", "bob", "in", "paris"], rng);
        let vec_of = |words: &[&str]| -> Vec<TokenVector> {
            words
                .iter()
                .map(|w| vectorize(&Token::from_surface(*w, PosTag::NOUN), &table).unwrap())
                .collect()
        };
        vec![
            TrainSentence {
                vectors: vec_of(&["alice", "met", "bob"]),
                labels: spans_to_labels(
                    &[
                        EntitySpan::typed(0, 0, EntityType::Person),
                        EntitySpan::typed(2, 2, EntityType::Person),
                    ],
                    3,
                )
                .unwrap(),
            },
            TrainSentence {
                vectors: vec_of(&["bob", "in", "paris"]),
                labels: spans_to_labels(&[EntitySpan::typed(2, 2, EntityType::Place)], 3).unwrap(),
            },
        ]
    }

    #[test]
    fn losses_are_logged_per_epoch_and_finite() {
        let mut rng = Rng::seed(60);
        let corpus = tiny_corpus(&mut rng);
        let cfg = NerTrainConfig {
            hidden: 6,
            epochs: 3,
            ..NerTrainConfig::default()
        };
        let out = train_ner(&corpus, &cfg, &mut rng).unwrap();
        assert_eq!(out.epoch_losses.len(), 3);
        assert!(out.epoch_losses.iter().all(|l| l.is_finite()));
    }

    #[test]
    fn same_seed_gives_bit_identical_parameters() {
        let mut rng_a = Rng::seed(61);
        let corpus_a = tiny_corpus(&mut rng_a);
        let mut rng_b = Rng::seed(61);
        let corpus_b = tiny_corpus(&mut rng_b);
        let cfg = NerTrainConfig {
            hidden: 5,
            epochs: 2,
            ..NerTrainConfig::default()
        };
        let a = train_ner(&corpus_a, &cfg, &mut rng_a).unwrap();
        let b = train_ner(&corpus_b, &cfg, &mut rng_b).unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.epoch_losses, b.epoch_losses);
    }

    #[test]
    fn empty_corpus_is_a_data_error() {
        let mut rng = Rng::seed(62);
        assert!(matches!(
            train_ner(&[], &NerTrainConfig::default(), &mut rng),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn loss_decreases_on_a_tiny_corpus() {
        let mut rng = Rng::seed(63);
        let corpus = tiny_corpus(&mut rng);
        let cfg = NerTrainConfig {
            hidden: 8,
            dropout: 0.0,
            epochs: 40,
            ..NerTrainConfig::default()
        };
        let out = train_ner(&corpus, &cfg, &mut rng).unwrap();
        assert!(out.epoch_losses.last().unwrap() < &out.epoch_losses[0]);
    }
}
