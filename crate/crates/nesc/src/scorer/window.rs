//! Context-window geometry around a candidate span.

use crate::error::{Error, Result};

/// A candidate span `[start, end]` widened by `k` positions on each side.
/// Window positions outside `[0, n)` are virtual padding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContextWindow {
    pub start: usize,
    pub end: usize,
    pub k: usize,
    /// Sentence length.
    pub n: usize,
}

/// Builds the window for a span of a sentence with `n` tokens.
pub fn context_window(start: usize, end: usize, k: usize, n: usize) -> Result<ContextWindow> {
    if start > end {
        return Err(Error::Usage(format!(
            "span start {start} is after end {end}"
        )));
    }
    if end >= n {
        return Err(Error::Usage(format!(
            "span end {end} is outside the {n}-token sentence"
        )));
    }
    Ok(ContextWindow { start, end, k, n })
}

impl ContextWindow {
    /// First window position in sentence coordinates; negative means pad.
    pub fn first(&self) -> isize {
        self.start as isize - self.k as isize
    }

    /// Last window position in sentence coordinates; `>= n` means pad.
    pub fn last(&self) -> isize {
        self.end as isize + self.k as isize
    }

    /// Window length: span length plus `2k`.
    pub fn len(&self) -> usize {
        self.end - self.start + 1 + 2 * self.k
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Window positions in order, each `None` when it falls in padding.
    pub fn positions(&self) -> impl Iterator<Item = Option<usize>> + '_ {
        let n = self.n as isize;
        (self.first()..=self.last()).map(move |p| {
            if p < 0 || p >= n {
                None
            } else {
                Some(p as usize)
            }
        })
    }

    /// Number of pad positions on each side.
    pub fn pads(&self) -> (usize, usize) {
        let left = self.k.saturating_sub(self.start);
        let right = self.k.saturating_sub(self.n - 1 - self.end);
        (left, right)
    }
}

/// Slices encoder outputs to the window, emitting all-zero vectors at pad
/// positions. `outputs` must hold one vector per sentence token.
pub fn window_slice(outputs: &[Vec<f64>], window: &ContextWindow) -> Result<Vec<Vec<f64>>> {
    if outputs.len() != window.n {
        return Err(Error::Usage(format!(
            "window built for a {}-token sentence, got {} encoder outputs",
            window.n,
            outputs.len()
        )));
    }
    let width = outputs.first().map_or(0, Vec::len);
    Ok(window
        .positions()
        .map(|p| match p {
            Some(i) => outputs[i].clone(),
            None => vec![0.0; width],
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_token_span_with_k2_makes_six_positions() {
        let w = context_window(3, 4, 2, 10).unwrap();
        assert_eq!(w.len(), 6);
        assert_eq!(w.pads(), (0, 0));
    }

    #[test]
    fn k_zero_window_is_the_span_itself() {
        let w = context_window(2, 5, 0, 8).unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.first(), 2);
        assert_eq!(w.last(), 5);
    }

    #[test]
    fn window_at_sentence_start_pads_left() {
        let w = context_window(0, 0, 2, 4).unwrap();
        assert_eq!(w.first(), -2);
        assert_eq!(w.last(), 2);
        assert_eq!(w.pads(), (2, 0));
        let ps: Vec<Option<usize>> = w.positions().collect();
        assert_eq!(ps, vec![None, None, Some(0), Some(1), Some(2)]);
    }

    #[test]
    fn invalid_spans_are_usage_errors() {
        assert!(matches!(context_window(3, 2, 1, 5), Err(Error::Usage(_))));
        assert!(matches!(context_window(0, 5, 1, 5), Err(Error::Usage(_))));
    }

    #[test]
    fn interior_window_slices_exactly() {
        let outputs: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64; 3]).collect();
        let w = context_window(2, 3, 1, 6).unwrap();
        let s = window_slice(&outputs, &w).unwrap();
        assert_eq!(s, outputs[1..=4].to_vec());
    }

    #[test]
    fn pad_positions_are_zero_vectors() {
        let outputs: Vec<Vec<f64>> = (0..3).map(|i| vec![1.0 + i as f64; 2]).collect();
        let w = context_window(0, 0, 2, 3).unwrap();
        let s = window_slice(&outputs, &w).unwrap();
        assert_eq!(s[0], vec![0.0, 0.0]);
        assert_eq!(s[1], vec![0.0, 0.0]);
        assert_eq!(s[2], outputs[0]);
    }

    #[test]
    fn adjacent_windows_tile_the_interior() {
        let outputs: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64]).collect();
        let a = context_window(2, 3, 0, 8).unwrap();
        let b = context_window(4, 5, 0, 8).unwrap();
        let mut joined = window_slice(&outputs, &a).unwrap();
        joined.extend(window_slice(&outputs, &b).unwrap());
        assert_eq!(joined, outputs[2..=5].to_vec());
    }

    #[test]
    fn length_mismatch_is_a_usage_error() {
        let outputs: Vec<Vec<f64>> = vec![vec![0.0]];
        let w = context_window(0, 0, 1, 2).unwrap();
        assert!(matches!(
            window_slice(&outputs, &w),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn window_arithmetic_invariant() {
        for n in 1..7usize {
            for i in 0..n {
                for j in i..n {
                    for k in 0..4usize {
                        let w = context_window(i, j, k, n).unwrap();
                        assert_eq!(w.len(), j - i + 1 + 2 * k);
                        let (l, r) = w.pads();
                        assert_eq!(l, k.saturating_sub(i));
                        assert_eq!(r, k.saturating_sub(n - 1 - j));
                        assert_eq!(w.positions().filter(Option::is_none).count(), l + r);
                    }
                }
            }
        }
    }
}
