//! The tagger: biLSTM encoder, dense + softmax emissions, linear-chain CRF.

mod crf;
mod encoder;
mod params;
mod spans;
mod tagger;
mod tags;
mod train;

pub use crf::{crf_nll, crf_nll_on_tape, path_score, viterbi};
pub use encoder::{emissions, emissions_on_tape, encode, encode_on_tape};
pub use params::{BoundNer, NerParams, BWD_NAMES, FWD_NAMES};
pub use spans::{decode_spans, spans_to_labels, EntitySpan};
pub use tagger::{tag, tag_vectors, TagOutput};
pub use tags::{EntityType, Label, ALL_LABELS, END, ENTITY_TYPES, NUM_LABELS, NUM_STATES, START};
pub use train::{train_ner, NerTrainConfig, NerTrainResult, TrainSentence};
