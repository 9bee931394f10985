//! Shared oracles and synthetic data for the integration suites.
//!
//! Everything here recomputes expectations from first principles via
//! exhaustive path enumeration, finite differences, and rank statistics,
//! independent of the dynamic programs and gradient code under test.

#![allow(dead_code)]

use nesc::corpus::{ConllToken, Corpus, Split};
use nesc::ner::{spans_to_labels, EntitySpan, Label, ALL_LABELS, END, NUM_LABELS, START};
use nesc::tensor::Tensor;
use nesc::{EmbeddingTable, EntityType, Rng};

/// Relative error with an absolute floor so near-zero gradients compare on
/// an absolute scale where finite differences are pure noise.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-2)
}

/// Central finite difference with step 1e-5.
pub fn central_diff(mut f: impl FnMut(f64) -> f64, at: f64) -> f64 {
    let h = 1e-5;
    (f(at + h) - f(at - h)) / (2.0 * h)
}

/// All 11^t label paths in lexicographic order.
pub fn all_label_paths(t: usize) -> Vec<Vec<Label>> {
    let mut paths: Vec<Vec<Label>> = vec![vec![]];
    for _ in 0..t {
        paths = paths
            .into_iter()
            .flat_map(|p| {
                ALL_LABELS.iter().map(move |l| {
                    let mut q = p.clone();
                    q.push(*l);
                    q
                })
            })
            .collect();
    }
    paths
}

/// Explicit score of one path, written out from the definition.
pub fn oracle_path_score(emissions: &[Vec<f64>], transitions: &Tensor, path: &[Label]) -> f64 {
    let mut score = transitions.at(START, path[0].index());
    for t in 0..path.len() {
        score += emissions[t][path[t].index()];
        if t + 1 < path.len() {
            score += transitions.at(path[t].index(), path[t + 1].index());
        }
    }
    score + transitions.at(path[path.len() - 1].index(), END)
}

/// log(sum(exp(score))) over every path, by direct summation.
pub fn oracle_log_partition(emissions: &[Vec<f64>], transitions: &Tensor) -> f64 {
    let scores: Vec<f64> = all_label_paths(emissions.len())
        .iter()
        .map(|p| oracle_path_score(emissions, transitions, p))
        .collect();
    let m = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + scores.iter().map(|s| (s - m).exp()).sum::<f64>().ln()
}

/// Best path by brute force. Ties break to the path that is smallest read
/// from its last label backward, matching the decoder's backtrack rule.
pub fn oracle_best_path(emissions: &[Vec<f64>], transitions: &Tensor) -> (Vec<Label>, f64) {
    let mut best_score = f64::NEG_INFINITY;
    let mut best_path: Option<Vec<Label>> = None;
    for path in all_label_paths(emissions.len()) {
        let score = oracle_path_score(emissions, transitions, &path);
        let better = match &best_path {
            None => true,
            Some(current) => {
                score > best_score
                    || (score == best_score && reversed_indices(&path) < reversed_indices(current))
            }
        };
        if better {
            best_score = score;
            best_path = Some(path);
        }
    }
    (best_path.expect("at least one path"), best_score)
}

fn reversed_indices(path: &[Label]) -> Vec<usize> {
    path.iter().rev().map(|l| l.index()).collect()
}

/// Area under the ROC curve via the rank statistic, ties by average rank.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = n - n_pos;
    assert!(n_pos > 0 && n_neg > 0, "AUC needs both classes");
    let rank_sum: f64 = labels
        .iter()
        .zip(&ranks)
        .filter(|(l, _)| **l)
        .map(|(_, r)| r)
        .sum();
    (rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0) / (n_pos * n_neg) as f64
}

/// Least-squares monotone fit by dynamic programming over the grid of all
/// fractions k/840; 840 = lcm(1..=8), so every mean of at most eight binary
/// labels is on the grid and the continuous optimum is found exactly.
pub fn oracle_monotone_fit(scores: &[f64], labels: &[u8]) -> Vec<f64> {
    const DENOM: usize = 840;
    let n = scores.len();
    assert!(n <= 8, "oracle grid only covers up to 8 points");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let y: Vec<f64> = order.iter().map(|&i| labels[i] as f64).collect();

    let levels: Vec<f64> = (0..=DENOM).map(|k| k as f64 / DENOM as f64).collect();
    let mut cost: Vec<f64> = levels.iter().map(|v| (v - y[0]).powi(2)).collect();
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(n);
    for yi in y.iter().skip(1) {
        // Best predecessor level for each ceiling, lowest level on ties.
        let mut best_at = vec![0usize; levels.len()];
        let mut best = cost[0];
        let mut arg = 0;
        for (g, &c) in cost.iter().enumerate() {
            if c < best {
                best = c;
                arg = g;
            }
            best_at[g] = arg;
        }
        let next: Vec<f64> = levels
            .iter()
            .enumerate()
            .map(|(g, v)| (v - yi).powi(2) + cost[best_at[g]])
            .collect();
        back.push(best_at);
        cost = next;
    }
    let mut g = cost
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty")
        .0;
    let mut fitted_sorted = vec![0.0; n];
    for i in (0..n).rev() {
        fitted_sorted[i] = levels[g];
        if i > 0 {
            g = back[i - 1][g];
        }
    }
    // Back to the input order.
    let mut fitted = vec![0.0; n];
    for (pos, &idx) in order.iter().enumerate() {
        fitted[idx] = fitted_sorted[pos];
    }
    fitted
}

/// A corpus of template sentences with planted entities: entity surfaces
/// imply their type, fillers are never entities. Deterministic in `seed`.
pub fn planted_corpus(n_sentences: usize, seed: u64) -> (Corpus, EmbeddingTable) {
    let mut rng = Rng::stream(seed, 0xC0FFEE);
    let fillers: Vec<String> = (0..30).map(|i| format!("f{i:02}")).collect();
    let entity_words: Vec<(String, EntityType)> = (0..10)
        .map(|i| {
            (
                format!("e{i}"),
                nesc::ner::ENTITY_TYPES[i % nesc::ner::ENTITY_TYPES.len()],
            )
        })
        .collect();

    let mut vocab: Vec<String> = fillers.clone();
    vocab.extend(entity_words.iter().map(|(w, _)| w.clone()));
    let table = EmbeddingTable::random(&vocab, &mut rng);

    let mut sentences = Vec::new();
    for _ in 0..n_sentences {
        let len = 5 + rng.below(4);
        let mut words: Vec<String> = (0..len)
            .map(|_| fillers[rng.below(fillers.len())].clone())
            .collect();
        let mut spans = Vec::new();
        let n_entities = 1 + rng.below(2);
        let mut cursor = 0;
        for _ in 0..n_entities {
            if cursor >= len {
                break;
            }
            let start = cursor + rng.below((len - cursor).min(3));
            let width = 1 + rng.below(2.min(len - start));
            // Same-type words make a coherent multi-token entity.
            let type_idx = rng.below(nesc::ner::ENTITY_TYPES.len());
            let ety = nesc::ner::ENTITY_TYPES[type_idx];
            let typed: Vec<&(String, EntityType)> = entity_words
                .iter()
                .filter(|(_, t)| *t == ety)
                .collect();
            for (offset, slot) in words[start..start + width].iter_mut().enumerate() {
                *slot = typed[offset % typed.len()].0.clone();
            }
            spans.push(EntitySpan::typed(start, start + width - 1, ety));
            // Leave a gap so entities never touch.
            cursor = start + width + 1;
        }
        let labels = spans_to_labels(&spans, len).expect("disjoint spans");
        sentences.push(
            words
                .into_iter()
                .zip(labels)
                .map(|(surface, label)| ConllToken {
                    surface,
                    pos: if label == Label::Outside {
                        nesc::PosTag::NOUN
                    } else {
                        nesc::PosTag::PROPN
                    },
                    label,
                })
                .collect::<Vec<_>>(),
        );
    }
    (Corpus::new(sentences, Split::Train), table)
}

/// Random emissions as if produced by a small encoder, plus a random
/// transition matrix.
pub fn random_crf_instance(t: usize, rng: &mut Rng) -> (Vec<Vec<f64>>, Tensor) {
    let emissions: Vec<Vec<f64>> = (0..t)
        .map(|_| (0..NUM_LABELS).map(|_| rng.uniform(-3.0, 3.0)).collect())
        .collect();
    let transitions = Tensor::new(
        vec![NUM_LABELS + 2, NUM_LABELS + 2],
        (0..(NUM_LABELS + 2) * (NUM_LABELS + 2))
            .map(|_| rng.uniform(-1.5, 1.5))
            .collect(),
    )
    .expect("shape matches data");
    (emissions, transitions)
}
