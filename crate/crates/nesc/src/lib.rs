//! Named-entity tagging with calibrated span confidence.
//!
//! This crate trains a biLSTM-CRF tagger over featurized tokens and, on top
//! of its frozen encoder, a binary classifier that assigns a probability to
//! any token span being a named entity. Scores can be isotonically
//! calibrated on held-out data. Everything runs on a small built-in `f64`
//! autodiff engine, single threaded and fully deterministic under a fixed
//! seed.
//!
//! The pieces, bottom up:
//!
//! - [`tensor`]: dense tensors, a reverse-mode tape, LSTM cells, Adam.
//! - [`features`]: tokenizer, surface/POS indicators, embedding lookup;
//!   each token becomes a 253-dim vector.
//! - [`ner`]: the tagger: biLSTM encoder, dense + softmax emissions,
//!   linear-chain CRF training and Viterbi decoding.
//! - [`scorer`]: context windows over the frozen encoder and the LSTM
//!   head that scores candidate spans.
//! - [`sampling`]: span-classifier training data built from gold entities,
//!   their perturbations, and length-matched random spans.
//! - [`calibration`]: pool-adjacent-violators isotonic regression.
//! - [`metrics`]: token/entity precision-recall-F1 and PR curves.
//! - [`corpus`], [`config`], [`bundle`], [`cli`]: file formats and the
//!   `nesc` binary's pipeline.
//!
//! The `examples/` directory has a runnable walkthrough per capability;
//! start with `span_confidence`.

pub mod bundle;
pub mod calibration;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod features;
pub mod metrics;
pub mod ner;
pub mod rng;
pub mod sampling;
pub mod scorer;
pub mod tensor;

pub use bundle::ModelBundle;
pub use calibration::{calibrate, fit_pav, IsotonicCalibrator};
pub use config::Config;
pub use corpus::{Corpus, Split};
pub use error::{Error, Result};
pub use features::{tokenize, vectorize, EmbeddingTable, PosTag, Token, TokenVector};
pub use metrics::{entity_prf, pr_curve, token_prf, Prf};
pub use ner::{
    decode_spans, tag, train_ner, EntitySpan, EntityType, Label, NerParams, NerTrainConfig,
};
pub use rng::Rng;
pub use sampling::{build_dataset, LengthDistribution, NescDataset, NescSample, SamplerConfig};
pub use scorer::{
    context_window, nesc_score, score_span, train_nesc, ContextWindow, NescParams,
    NescTrainConfig,
};
