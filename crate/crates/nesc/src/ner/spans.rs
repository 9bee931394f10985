//! Entity spans and their IOB encoding/decoding.

use super::tags::{EntityType, Label};
use crate::error::{Error, Result};

/// A token index range `[start, end]` (inclusive) with an optional type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntitySpan {
    pub start: usize,
    pub end: usize,
    pub entity_type: Option<EntityType>,
}

impl EntitySpan {
    pub fn typed(start: usize, end: usize, entity_type: EntityType) -> Self {
        debug_assert!(start <= end);
        EntitySpan {
            start,
            end,
            entity_type: Some(entity_type),
        }
    }

    pub fn untyped(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        EntitySpan {
            start,
            end,
            entity_type: None,
        }
    }

    /// Number of tokens covered.
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Same token range, regardless of type.
    pub fn same_range(&self, other: &EntitySpan) -> bool {
        self.start == other.start && self.end == other.end
    }
}

/// Extracts typed spans from a label sequence.
///
/// Maximal runs `B-X (I-X)*` become one span of type X. Two repairs make
/// this total on arbitrary sequences: an `I-X` with no preceding `B-X`/`I-X`
/// opens a new span as if it were `B-X`, and an `I-Y` directly after a
/// type-X span opens a new span of type Y.
pub fn decode_spans(labels: &[Label]) -> Vec<EntitySpan> {
    let mut spans = Vec::new();
    let mut open: Option<(usize, EntityType)> = None;
    for (i, label) in labels.iter().enumerate() {
        match label {
            Label::Outside => {
                if let Some((s, t)) = open.take() {
                    spans.push(EntitySpan::typed(s, i - 1, t));
                }
            }
            Label::Begin(t) => {
                if let Some((s, ot)) = open.take() {
                    spans.push(EntitySpan::typed(s, i - 1, ot));
                }
                open = Some((i, *t));
            }
            Label::Inside(t) => match open {
                Some((_, ot)) if ot == *t => {}
                _ => {
                    // Repair: treat as a fresh B-t.
                    if let Some((s, ot)) = open.take() {
                        spans.push(EntitySpan::typed(s, i - 1, ot));
                    }
                    open = Some((i, *t));
                }
            },
        }
    }
    if let Some((s, t)) = open {
        spans.push(EntitySpan::typed(s, labels.len() - 1, t));
    }
    spans
}

/// Encodes non-overlapping typed spans back to a label sequence.
pub fn spans_to_labels(spans: &[EntitySpan], len: usize) -> Result<Vec<Label>> {
    let mut labels = vec![Label::Outside; len];
    let mut sorted: Vec<&EntitySpan> = spans.iter().collect();
    sorted.sort_by_key(|s| (s.start, s.end));
    let mut prev_end: Option<usize> = None;
    for span in sorted {
        let t = span.entity_type.ok_or_else(|| {
            Error::Usage("spans_to_labels needs typed spans".to_string())
        })?;
        if span.end >= len {
            return Err(Error::Usage(format!(
                "span [{}, {}] exceeds sentence length {len}",
                span.start, span.end
            )));
        }
        if let Some(pe) = prev_end {
            if span.start <= pe {
                return Err(Error::Data(format!(
                    "overlapping spans at token {}",
                    span.start
                )));
            }
        }
        labels[span.start] = Label::Begin(t);
        for l in labels.iter_mut().take(span.end + 1).skip(span.start + 1) {
            *l = Label::Inside(t);
        }
        prev_end = Some(span.end);
    }
    Ok(labels)
}
