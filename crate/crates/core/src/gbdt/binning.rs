//! Per-feature quantile binning with sparse storage of non-default bins.

use rayon::prelude::*;

use super::Matrix;

/// Threshold strictly between two consecutive distinct values `a < b`.
pub(crate) fn midpoint(a: f64, b: f64) -> f64 {
    let t = a + (b - a) * 0.5;
    if t >= b || t < a {
        a
    } else {
        t
    }
}

/// Split thresholds for one feature. When there are at most `n_bins` distinct
/// values every gap between them gets a threshold; otherwise cuts are placed
/// at approximately equal-count quantiles.
pub(crate) fn bin_thresholds(values: &[f64], n_bins: usize) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut distinct: Vec<(f64, usize)> = Vec::new();
    for v in sorted {
        match distinct.last_mut() {
            Some((last, count)) if *last == v => *count += 1,
            _ => distinct.push((v, 1)),
        }
    }
    if distinct.len() <= n_bins {
        return distinct.windows(2).map(|w| midpoint(w[0].0, w[1].0)).collect();
    }
    let n = values.len();
    let mut thresholds = Vec::with_capacity(n_bins - 1);
    let mut cumulative = 0usize;
    let mut next_cut = 1usize;
    for w in distinct.windows(2) {
        cumulative += w[0].1;
        // cut after this distinct value once the cumulative share passes k/n_bins
        if cumulative * n_bins >= next_cut * n {
            thresholds.push(midpoint(w[0].0, w[1].0));
            while next_cut < n_bins && cumulative * n_bins >= next_cut * n {
                next_cut += 1;
            }
            if next_cut >= n_bins {
                break;
            }
        }
    }
    thresholds
}

#[derive(Debug, Clone)]
pub(crate) struct BinnedFeature {
    pub thresholds: Vec<f64>,
    /// Most frequent bin; rows in it are not stored in `entries`.
    pub default_bin: u8,
    /// `(row, bin)` for every row outside the default bin, rows ascending.
    pub entries: Vec<(u32, u8)>,
}

impl BinnedFeature {
    pub fn n_bins(&self) -> usize {
        self.thresholds.len() + 1
    }
}

#[derive(Debug, Clone)]
pub(crate) struct BinnedMatrix {
    pub features: Vec<BinnedFeature>,
}

impl BinnedMatrix {
    pub fn build(x: &Matrix, n_bins: usize) -> Self {
        let features = (0..x.n_cols())
            .into_par_iter()
            .map(|f| {
                let column: Vec<f64> = x.column(f).collect();
                let thresholds = bin_thresholds(&column, n_bins);
                let bins: Vec<u8> = column
                    .iter()
                    .map(|&v| thresholds.partition_point(|&t| t < v) as u8)
                    .collect();
                let mut counts = vec![0usize; thresholds.len() + 1];
                for &b in &bins {
                    counts[b as usize] += 1;
                }
                let default_bin = counts
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                    .map(|(b, _)| b as u8)
                    .unwrap_or(0);
                let entries = bins
                    .iter()
                    .enumerate()
                    .filter(|&(_, &b)| b != default_bin)
                    .map(|(r, &b)| (r as u32, b))
                    .collect();
                BinnedFeature { thresholds, default_bin, entries }
            })
            .collect();
        BinnedMatrix { features }
    }
}
