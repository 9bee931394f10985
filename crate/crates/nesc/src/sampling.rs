//! Span-classifier training data: positives from gold entities, negatives
//! from span perturbations and from length-matched random spans.
//!
//! A span counts as negative only when it is not exactly equal to a gold
//! entity range; overlapping a gold entity is fine. Random negative lengths
//! follow the empirical length distribution of the gold entities.

use std::collections::HashSet;
use std::io::Write;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::ner::EntitySpan;
use crate::rng::Rng;

/// Where a sample came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Positive,
    Perturbed,
    Random,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Positive => "positive",
            Provenance::Perturbed => "perturbed",
            Provenance::Random => "random",
        }
    }
}

/// One candidate span with its binary target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NescSample {
    pub sentence: usize,
    pub start: usize,
    pub end: usize,
    pub target: bool,
    pub provenance: Provenance,
}

/// Empirical distribution over gold entity lengths (in tokens).
#[derive(Debug, Clone, PartialEq)]
pub struct LengthDistribution {
    lengths: Vec<usize>,
    probs: Vec<f64>,
}

impl LengthDistribution {
    /// Fits the pmf from every gold entity in the corpus.
    pub fn fit(corpus: &Corpus) -> Result<Self> {
        let mut counts: Vec<(usize, usize)> = Vec::new();
        for i in 0..corpus.len() {
            for span in corpus.gold_spans(i) {
                let len = span.len();
                match counts.iter_mut().find(|(l, _)| *l == len) {
                    Some((_, c)) => *c += 1,
                    None => counts.push((len, 1)),
                }
            }
        }
        if counts.is_empty() {
            return Err(Error::Data(
                "cannot fit a length distribution: corpus has no entities".into(),
            ));
        }
        counts.sort_by_key(|(l, _)| *l);
        let total: usize = counts.iter().map(|(_, c)| c).sum();
        Ok(LengthDistribution {
            lengths: counts.iter().map(|(l, _)| *l).collect(),
            probs: counts
                .iter()
                .map(|(_, c)| *c as f64 / total as f64)
                .collect(),
        })
    }

    pub fn from_parts(lengths: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if lengths.len() != probs.len() || lengths.is_empty() {
            return Err(Error::Usage("length distribution parts misaligned".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Data(format!(
                "length distribution sums to {total}, not 1"
            )));
        }
        Ok(LengthDistribution { lengths, probs })
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob_of(&self, len: usize) -> f64 {
        self.lengths
            .iter()
            .position(|&l| l == len)
            .map_or(0.0, |i| self.probs[i])
    }

    /// Draws one length by inverse CDF.
    pub fn sample(&self, rng: &mut Rng) -> usize {
        let u = rng.unit();
        let mut acc = 0.0;
        for (l, p) in self.lengths.iter().zip(&self.probs) {
            acc += p;
            if u < acc {
                return *l;
            }
        }
        *self.lengths.last().expect("non-empty")
    }
}

/// Positive samples: one per gold entity of the sentence.
pub fn extract_positives(sentence: usize, gold: &[EntitySpan]) -> Vec<NescSample> {
    gold.iter()
        .map(|s| NescSample {
            sentence,
            start: s.start,
            end: s.end,
            target: true,
            provenance: Provenance::Positive,
        })
        .collect()
}

/// Negative candidates made by shrinking, shifting, and extending a gold
/// span inside a sentence of `n` tokens. Out-of-bounds and empty candidates
/// are dropped, as is anything exactly equal to a gold entity range.
pub fn perturb(span: (usize, usize), n: usize, gold: &[EntitySpan]) -> Vec<(usize, usize)> {
    let (i, j) = (span.0 as isize, span.1 as isize);
    let candidates = [
        (i + 1, j),     // shrink-left
        (i, j - 1),     // shrink-right
        (i - 1, j - 1), // shift-left
        (i + 1, j + 1), // shift-right
        (i - 1, j),     // extend-left
        (i, j + 1),     // extend-right
    ];
    candidates
        .into_iter()
        .filter(|&(a, b)| a >= 0 && a <= b && (b as usize) < n)
        .map(|(a, b)| (a as usize, b as usize))
        .filter(|&(a, b)| !gold.iter().any(|g| g.start == a && g.end == b))
        .collect()
}

/// Draws a random non-entity span, or gives up after `max_attempts`.
pub fn sample_random_negative(
    n: usize,
    gold: &[EntitySpan],
    dist: &LengthDistribution,
    rng: &mut Rng,
    max_attempts: usize,
) -> Option<(usize, usize)> {
    for _ in 0..max_attempts {
        let len = dist.sample(rng);
        if len > n {
            continue;
        }
        let start = rng.below(n - len + 1);
        let end = start + len - 1;
        if !gold.iter().any(|g| g.start == start && g.end == end) {
            return Some((start, end));
        }
    }
    None
}

/// Knobs for dataset construction.
#[derive(Debug, Clone)]
pub struct SamplerConfig {
    /// Context size the dataset is built for; recorded so training can
    /// reject a mismatched window configuration.
    pub context_size: usize,
    pub random_negatives_per_sentence: usize,
    pub max_attempts: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            context_size: 2,
            random_negatives_per_sentence: 2,
            max_attempts: 20,
        }
    }
}

/// The assembled span-classification training set.
#[derive(Debug, Clone, PartialEq)]
pub struct NescDataset {
    pub samples: Vec<NescSample>,
    pub w_pos: f64,
    pub w_neg: f64,
    pub context_size: usize,
    pub length_dist: LengthDistribution,
}

impl NescDataset {
    pub fn positives(&self) -> usize {
        self.samples.iter().filter(|s| s.target).count()
    }

    pub fn negatives(&self) -> usize {
        self.samples.len() - self.positives()
    }

    /// TSV export: sentence id, start, end, target, provenance.
    pub fn write(&self, mut w: impl Write) -> Result<()> {
        for s in &self.samples {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}",
                s.sentence,
                s.start,
                s.end,
                s.target as u8,
                s.provenance.name()
            )?;
        }
        Ok(())
    }
}

/// Builds the full dataset: positives, perturbation negatives, then random
/// negatives, deduplicated on (sentence, span) keeping the first occurrence.
/// Each sentence draws randomness from its own `(seed, index)` stream, so
/// the result is deterministic.
pub fn build_dataset(corpus: &Corpus, cfg: &SamplerConfig, seed: u64) -> Result<NescDataset> {
    if corpus.is_empty() {
        return Err(Error::Data("cannot build samples from an empty corpus".into()));
    }
    let length_dist = LengthDistribution::fit(corpus)?;

    let mut samples = Vec::new();
    for si in 0..corpus.len() {
        let gold = corpus.gold_spans(si);
        let n = corpus.sentences[si].len();
        let mut seen: HashSet<(usize, usize)> = HashSet::new();

        for s in extract_positives(si, &gold) {
            if seen.insert((s.start, s.end)) {
                samples.push(s);
            }
        }
        for g in &gold {
            for (start, end) in perturb((g.start, g.end), n, &gold) {
                if seen.insert((start, end)) {
                    samples.push(NescSample {
                        sentence: si,
                        start,
                        end,
                        target: false,
                        provenance: Provenance::Perturbed,
                    });
                }
            }
        }
        let mut rng = Rng::stream(seed, si as u64);
        for _ in 0..cfg.random_negatives_per_sentence {
            if let Some((start, end)) =
                sample_random_negative(n, &gold, &length_dist, &mut rng, cfg.max_attempts)
            {
                if seen.insert((start, end)) {
                    samples.push(NescSample {
                        sentence: si,
                        start,
                        end,
                        target: false,
                        provenance: Provenance::Random,
                    });
                }
            }
        }
    }

    let n_pos = samples.iter().filter(|s| s.target).count();
    let n_neg = samples.len() - n_pos;
    if n_pos == 0 {
        return Err(Error::Data("dataset has no positive samples".into()));
    }
    let w_pos = if n_neg == 0 {
        1.0
    } else {
        n_neg as f64 / n_pos as f64
    };
    Ok(NescDataset {
        samples,
        w_pos,
        w_neg: 1.0,
        context_size: cfg.context_size,
        length_dist,
    })
}
