//! Isotonic score calibration via pool-adjacent-violators.
//!
//! Fitting sorts (score, label) pairs by score, merges ties into weighted
//! blocks, then pools adjacent blocks until the fitted values are
//! nondecreasing. The result is the least-squares monotone fit. Applying
//! the calibrator interpolates linearly between the knot scores and clamps
//! outside their range.

use crate::error::{Error, Result};

/// A fitted monotone mapping from raw scores to calibrated probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotonicCalibrator {
    /// Strictly ascending knot scores.
    thresholds: Vec<f64>,
    /// Nondecreasing calibrated values, one per knot.
    values: Vec<f64>,
}

impl IsotonicCalibrator {
    /// Rebuilds a calibrator from persisted knot arrays.
    pub fn from_knots(thresholds: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if thresholds.len() != values.len() || thresholds.is_empty() {
            return Err(Error::Usage(
                "calibrator needs equally many thresholds and values".into(),
            ));
        }
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Usage("calibrator thresholds must ascend".into()));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Usage("calibrator values must be nondecreasing".into()));
        }
        Ok(IsotonicCalibrator { thresholds, values })
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Least-squares monotone fit of binary labels against scores.
pub fn fit_pav(scores: &[f64], labels: &[u8]) -> Result<IsotonicCalibrator> {
    if scores.is_empty() || scores.len() != labels.len() {
        return Err(Error::Usage(format!(
            "fit_pav: {} scores vs {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if labels.iter().any(|&l| l > 1) {
        return Err(Error::Usage("fit_pav labels must be 0 or 1".into()));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Usage("fit_pav scores must be finite".into()));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Merge equal scores into single weighted points.
    let mut points: Vec<(f64, f64, f64)> = Vec::new(); // (score, mean, weight)
    for &idx in &order {
        match points.last_mut() {
            Some((s, mean, w)) if *s == scores[idx] => {
                *mean = (*mean * *w + labels[idx] as f64) / (*w + 1.0);
                *w += 1.0;
            }
            _ => points.push((scores[idx], labels[idx] as f64, 1.0)),
        }
    }

    // Pool adjacent violators: each block keeps its weighted mean.
    let mut blocks: Vec<(f64, f64, usize)> = Vec::new(); // (mean, weight, count of points)
    for &(_, mean, w) in &points {
        blocks.push((mean, w, 1));
        while blocks.len() >= 2 {
            let last = blocks[blocks.len() - 1];
            let prev = blocks[blocks.len() - 2];
            if prev.0 <= last.0 {
                break;
            }
            blocks.pop();
            blocks.pop();
            let w = prev.1 + last.1;
            let mean = (prev.0 * prev.1 + last.0 * last.1) / w;
            blocks.push((mean, w, prev.2 + last.2));
        }
    }

    let mut thresholds = Vec::with_capacity(points.len());
    let mut values = Vec::with_capacity(points.len());
    let mut at = 0;
    for (mean, _, count) in blocks {
        for _ in 0..count {
            thresholds.push(points[at].0);
            values.push(mean);
            at += 1;
        }
    }
    IsotonicCalibrator::from_knots(thresholds, values)
}

/// Applies a fitted calibrator: interpolate between knots, clamp outside.
pub fn calibrate(score: f64, cal: &IsotonicCalibrator) -> f64 {
    let t = &cal.thresholds;
    let v = &cal.values;
    if score <= t[0] {
        return v[0];
    }
    if score >= t[t.len() - 1] {
        return v[v.len() - 1];
    }
    // First knot strictly above the score.
    let hi = t.partition_point(|&x| x <= score);
    let lo = hi - 1;
    if t[lo] == score {
        return v[lo];
    }
    let frac = (score - t[lo]) / (t[hi] - t[lo]);
    v[lo] + frac * (v[hi] - v[lo])
}
