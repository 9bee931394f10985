//! Evaluation: token-level and entity-level precision/recall/F1, and the
//! precision-recall curve for span scores.
//!
//! Zero-denominator convention throughout: precision is 1 when nothing was
//! predicted, recall is 1 when nothing was there to find. This keeps curves
//! well-defined at extreme thresholds.

use std::io::Write;

use crate::error::{Error, Result};
use crate::ner::{EntitySpan, Label};

/// Precision, recall, and F1 with their underlying counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let precision = if tp + fp == 0 {
            1.0
        } else {
            tp as f64 / (tp + fp) as f64
        };
        let recall = if tp + fn_ == 0 {
            1.0
        } else {
            tp as f64 / (tp + fn_) as f64
        };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf {
            tp,
            fp,
            fn_,
            precision,
            recall,
            f1,
        }
    }
}

/// Token-level score: binary entity-vs-outside per token, types ignored.
pub fn token_prf(gold: &[Label], pred: &[Label]) -> Result<Prf> {
    if gold.len() != pred.len() {
        return Err(Error::Usage(format!(
            "token_prf: {} gold labels vs {} predicted",
            gold.len(),
            pred.len()
        )));
    }
    let mut tp = 0;
    let mut fp = 0;
    let mut fn_ = 0;
    for (g, p) in gold.iter().zip(pred) {
        let g_ent = *g != Label::Outside;
        let p_ent = *p != Label::Outside;
        match (g_ent, p_ent) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            (false, false) => {}
        }
    }
    Ok(Prf::from_counts(tp, fp, fn_))
}

/// Entity-level score over parallel per-sentence span lists. A prediction
/// is correct only on an exact (start, end) match, plus an exact type match
/// when `typed`, with one-to-one pairing inside each sentence.
pub fn entity_prf(
    gold: &[Vec<EntitySpan>],
    pred: &[Vec<EntitySpan>],
    typed: bool,
) -> Result<Prf> {
    if gold.len() != pred.len() {
        return Err(Error::Usage(format!(
            "entity_prf: {} gold sentences vs {} predicted",
            gold.len(),
            pred.len()
        )));
    }
    let mut tp = 0;
    let mut fp = 0;
    let mut fn_ = 0;
    for (g_spans, p_spans) in gold.iter().zip(pred) {
        check_disjoint(g_spans)?;
        let mut used = vec![false; g_spans.len()];
        for p in p_spans {
            let hit = g_spans.iter().enumerate().find(|(i, g)| {
                !used[*i] && g.same_range(p) && (!typed || g.entity_type == p.entity_type)
            });
            match hit {
                Some((i, _)) => {
                    used[i] = true;
                    tp += 1;
                }
                None => fp += 1,
            }
        }
        fn_ += used.iter().filter(|u| !**u).count();
    }
    Ok(Prf::from_counts(tp, fp, fn_))
}

fn check_disjoint(spans: &[EntitySpan]) -> Result<()> {
    let mut sorted: Vec<&EntitySpan> = spans.iter().collect();
    sorted.sort_by_key(|s| (s.start, s.end));
    for w in sorted.windows(2) {
        if w[1].start <= w[0].end {
            return Err(Error::Data(format!(
                "gold spans overlap at tokens {}..={}",
                w[1].start,
                w[0].end
            )));
        }
    }
    Ok(())
}

/// One point of the precision-recall sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Sweeps classification thresholds over scored samples: at threshold t a
/// sample is predicted positive when its score is at least t.
pub fn pr_curve(scores: &[f64], labels: &[u8], thresholds: &[f64]) -> Result<Vec<PrPoint>> {
    if scores.len() != labels.len() {
        return Err(Error::Usage(format!(
            "pr_curve: {} scores vs {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if thresholds.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Usage("pr_curve thresholds must ascend".into()));
    }
    Ok(thresholds
        .iter()
        .map(|&t| {
            let mut tp = 0;
            let mut fp = 0;
            let mut fn_ = 0;
            for (s, &l) in scores.iter().zip(labels) {
                let predicted = *s >= t;
                match (l == 1, predicted) {
                    (true, true) => tp += 1,
                    (false, true) => fp += 1,
                    (true, false) => fn_ += 1,
                    (false, false) => {}
                }
            }
            let prf = Prf::from_counts(tp, fp, fn_);
            PrPoint {
                threshold: t,
                precision: prf.precision,
                recall: prf.recall,
            }
        })
        .collect())
}

/// The default sweep: 0.00 to 1.00 in steps of 0.01.
pub fn default_thresholds() -> Vec<f64> {
    (0..=100).map(|i| i as f64 / 100.0).collect()
}

/// CSV export with a `threshold,precision,recall` header.
pub fn write_pr_curve(points: &[PrPoint], mut w: impl Write) -> Result<()> {
    writeln!(w, "threshold,precision,recall")?;
    for p in points {
        writeln!(w, "{},{},{}", p.threshold, p.precision, p.recall)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ner::EntityType;

    fn l(s: &str) -> Label {
        Label::parse(s).unwrap()
    }

    #[test]
    fn identical_labels_score_one() {
        let gold = vec![l("B-Place"), l("I-Place"), l("O")];
        let prf = token_prf(&gold, &gold).unwrap();
        assert_eq!((prf.precision, prf.recall, prf.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn all_outside_prediction_has_unit_precision_zero_recall() {
        let gold = vec![l("B-Place"), l("I-Place"), l("O")];
        let pred = vec![l("O"), l("O"), l("O")];
        let prf = token_prf(&gold, &pred).unwrap();
        assert_eq!(prf.precision, 1.0);
        assert_eq!(prf.recall, 0.0);
        assert_eq!(prf.f1, 0.0);
    }

    #[test]
    fn token_level_ignores_types_and_bi_confusion() {
        let gold = vec![l("B-Place"), l("I-Place")];
        let pred = vec![l("I-Person"), l("B-Other")];
        let prf = token_prf(&gold, &pred).unwrap();
        assert_eq!((prf.tp, prf.fp, prf.fn_), (2, 0, 0));
    }

    #[test]
    fn length_mismatch_is_a_usage_error() {
        assert!(matches!(
            token_prf(&[l("O")], &[]),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn exact_prediction_scores_one_at_entity_level() {
        let gold = vec![vec![EntitySpan::typed(2, 3, EntityType::Place)]];
        let prf = entity_prf(&gold, &gold, true).unwrap();
        assert_eq!((prf.precision, prf.recall, prf.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn wrong_type_counts_only_untyped() {
        let gold = vec![vec![EntitySpan::typed(2, 3, EntityType::Place)]];
        let pred = vec![vec![EntitySpan::typed(2, 3, EntityType::Person)]];
        let untyped = entity_prf(&gold, &pred, false).unwrap();
        assert_eq!((untyped.precision, untyped.recall), (1.0, 1.0));
        let typed = entity_prf(&gold, &pred, true).unwrap();
        assert_eq!((typed.precision, typed.recall), (0.0, 0.0));
    }

    #[test]
    fn partial_overlap_is_no_match() {
        let gold = vec![vec![EntitySpan::typed(3, 4, EntityType::Place)]];
        let pred = vec![vec![EntitySpan::typed(4, 4, EntityType::Place)]];
        let prf = entity_prf(&gold, &pred, false).unwrap();
        assert_eq!((prf.tp, prf.fp, prf.fn_), (0, 1, 1));
        assert_eq!(prf.precision, 0.0);
        assert_eq!(prf.recall, 0.0);
    }

    #[test]
    fn duplicate_predictions_match_one_to_one() {
        let gold = vec![vec![EntitySpan::typed(0, 0, EntityType::Person)]];
        let pred = vec![vec![
            EntitySpan::typed(0, 0, EntityType::Person),
            EntitySpan::typed(0, 0, EntityType::Person),
        ]];
        let prf = entity_prf(&gold, &pred, true).unwrap();
        assert_eq!((prf.tp, prf.fp, prf.fn_), (1, 1, 0));
    }

    #[test]
    fn overlapping_gold_is_a_data_error() {
        let gold = vec![vec![
            EntitySpan::typed(0, 2, EntityType::Person),
            EntitySpan::typed(2, 3, EntityType::Person),
        ]];
        assert!(matches!(
            entity_prf(&gold, &gold, true),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn curve_endpoints_follow_the_conventions() {
        let scores = [0.2, 0.6, 0.9];
        let labels = [0, 1, 1];
        let pts = pr_curve(&scores, &labels, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(pts[0].recall, 1.0);
        // Above every score: nothing predicted.
        assert_eq!(pts[2].recall, 0.0);
        assert_eq!(pts[2].precision, 1.0);
    }

    #[test]
    fn recall_is_nonincreasing_along_the_sweep() {
        let scores = [0.1, 0.4, 0.4, 0.7, 0.95];
        let labels = [0, 1, 0, 1, 1];
        let pts = pr_curve(&scores, &labels, &default_thresholds()).unwrap();
        for w in pts.windows(2) {
            assert!(w[1].recall <= w[0].recall + 1e-15);
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let pts = vec![PrPoint {
            threshold: 0.5,
            precision: 0.75,
            recall: 0.5,
        }];
        let mut out = Vec::new();
        write_pr_curve(&pts, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "threshold,precision,recall\n0.5,0.75,0.5\n");
    }
}
