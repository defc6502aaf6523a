//! Regression metrics in log10 Ki units.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// log10 Ki separating inhibitors (Ki < 10 uM) from non-inhibitors.
pub const DEFAULT_THRESHOLD: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("prediction and truth lengths differ ({pred} vs {truth})")]
    LengthMismatch { pred: usize, truth: usize },
    #[error("no values to evaluate")]
    Empty,
    #[error("bin edges must be finite, strictly increasing and at least two: {0}")]
    BadEdges(String),
}

fn check(pred: &[f64], truth: &[f64]) -> Result<(), EvalError> {
    if pred.len() != truth.len() {
        return Err(EvalError::LengthMismatch { pred: pred.len(), truth: truth.len() });
    }
    if pred.is_empty() {
        return Err(EvalError::Empty);
    }
    Ok(())
}

pub fn mae(pred: &[f64], truth: &[f64]) -> Result<f64, EvalError> {
    check(pred, truth)?;
    Ok(pred.iter().zip(truth).map(|(p, t)| (p - t).abs()).sum::<f64>() / pred.len() as f64)
}

/// Default bin edges: -2 to 12 in steps of 0.5.
pub fn default_bin_edges() -> Vec<f64> {
    (0..=28).map(|i| -2.0 + 0.5 * i as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinStat {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    /// `None` for an empty bin.
    pub mae: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedMae {
    pub bins: Vec<BinStat>,
    /// Truth values outside `[first edge, last edge)`.
    pub out_of_range: usize,
}

/// MAE within bins of the true value. Bin `i` is `[edges[i], edges[i + 1])`.
pub fn binned_mae(pred: &[f64], truth: &[f64], edges: &[f64]) -> Result<BinnedMae, EvalError> {
    check(pred, truth)?;
    if edges.len() < 2 || edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EvalError::BadEdges(format!("{edges:?}")));
    }
    let nb = edges.len() - 1;
    let mut sums = vec![0.0; nb];
    let mut counts = vec![0usize; nb];
    let mut out_of_range = 0;
    for (p, t) in pred.iter().zip(truth) {
        if *t < edges[0] || *t >= edges[nb] || t.is_nan() {
            out_of_range += 1;
            continue;
        }
        let b = edges.partition_point(|&e| e <= *t) - 1;
        sums[b] += (p - t).abs();
        counts[b] += 1;
    }
    let bins = (0..nb)
        .map(|b| BinStat {
            lo: edges[b],
            hi: edges[b + 1],
            count: counts[b],
            mae: (counts[b] > 0).then(|| sums[b] / counts[b] as f64),
        })
        .collect();
    Ok(BinnedMae { bins, out_of_range })
}

/// Fraction of pairs on the same side of `threshold`. A value equal to the
/// threshold counts as not below it, for both prediction and truth.
pub fn classify_accuracy(pred: &[f64], truth: &[f64], threshold: f64) -> Result<f64, EvalError> {
    check(pred, truth)?;
    let hits = pred.iter().zip(truth).filter(|(p, t)| (**p < threshold) == (**t < threshold)).count();
    Ok(hits as f64 / pred.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n: usize,
    pub mae: f64,
    pub threshold: f64,
    pub accuracy: f64,
    pub binned: BinnedMae,
    /// MAE of always predicting the mean truth, for reference.
    pub mean_predictor_mae: f64,
}

pub fn evaluate(pred: &[f64], truth: &[f64], edges: &[f64], threshold: f64) -> Result<EvalReport, EvalError> {
    let mean = truth.iter().sum::<f64>() / truth.len().max(1) as f64;
    let baseline = vec![mean; truth.len()];
    Ok(EvalReport {
        n: pred.len(),
        mae: mae(pred, truth)?,
        threshold,
        accuracy: classify_accuracy(pred, truth, threshold)?,
        binned: binned_mae(pred, truth, edges)?,
        mean_predictor_mae: mae(&baseline, truth)?,
    })
}

impl EvalReport {
    /// Plot-ready rows `bin_center,count,mae`; empty bins leave `mae` blank.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_center,count,mae\n");
        for b in &self.binned.bins {
            let mae = b.mae.map(|m| m.to_string()).unwrap_or_default();
            writeln!(out, "{},{},{}", (b.lo + b.hi) / 2.0, b.count, mae).unwrap();
        }
        out
    }
}
