//! Span confidence: context windows over the frozen encoder, an LSTM head,
//! and a calibrated probability per candidate span.

mod head;
mod score;
mod train;
mod window;

pub use head::{
    head_log_probs_on_tape, nesc_score, weighted_ce, BoundNesc, NescParams, HEAD_NAMES,
    POSITIVE_CLASS,
};
pub use score::{score_span, score_span_encoded};
pub use train::{
    slice_dataset, train_head, train_nesc, HeadSample, NescTrainConfig, NescTrainResult,
};
pub use window::{context_window, window_slice, ContextWindow};
