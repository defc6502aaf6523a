use std::collections::HashMap;

use rayon::prelude::*;

use super::{Dataset, DatasetError, Subset};
use crate::gbdt::Matrix;
use crate::ligand::{ecfp, Fingerprint, DEFAULT_NBITS, DEFAULT_RADIUS};
use crate::protein::{descriptor_for_residues, descriptor_labels, ReceptorDescriptor, ResiduePropertyTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeaturizeOptions {
    pub radius: u32,
    pub nbits: u32,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
}

impl Default for FeaturizeOptions {
    fn default() -> Self {
        FeaturizeOptions { radius: DEFAULT_RADIUS, nbits: DEFAULT_NBITS, workers: 0 }
    }
}

/// Pairwise design matrix: receptor descriptor columns, then fingerprint bits.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    /// Pair key of each row.
    pub ids: Vec<String>,
    pub labels: Vec<String>,
    pub x: Matrix,
    pub y: Vec<f64>,
    pub fingerprints: Vec<Fingerprint>,
}

pub fn featurize_pairs(
    d: &Dataset,
    which: Subset,
    table: &ResiduePropertyTable,
    opts: FeaturizeOptions,
) -> Result<FeatureMatrix, DatasetError> {
    let run = || featurize_inner(d, which, table, opts);
    if opts.workers == 0 {
        return run();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| DatasetError::Featurize { id: "-".into(), reason: e.to_string() })?;
    pool.install(run)
}

fn featurize_inner(
    d: &Dataset,
    which: Subset,
    table: &ResiduePropertyTable,
    opts: FeaturizeOptions,
) -> Result<FeatureMatrix, DatasetError> {
    let records: Vec<_> = d.subset(which).collect();

    let mut unique: Vec<&str> = records.iter().map(|r| r.receptor.residues()).collect();
    unique.sort_unstable();
    unique.dedup();
    let descriptors: HashMap<&str, ReceptorDescriptor> = unique
        .par_iter()
        .map(|&s| {
            descriptor_for_residues(table, s)
                .map(|desc| (s, desc))
                .map_err(|e| (s, e.to_string()))
        })
        .collect::<Result<_, _>>()
        .map_err(|(s, reason)| {
            let id = records.iter().find(|r| r.receptor.residues() == s).map(|r| r.receptor.id()).unwrap_or("?");
            DatasetError::Featurize { id: id.to_string(), reason }
        })?;

    let fingerprints: Vec<Fingerprint> = records
        .par_iter()
        .map(|r| {
            ecfp(&r.ligand, opts.radius, opts.nbits)
                .map_err(|e| DatasetError::Featurize { id: r.pair_key.to_string(), reason: e.to_string() })
        })
        .collect::<Result<_, _>>()?;

    let mut labels = descriptor_labels();
    let desc_len = labels.len();
    labels.extend((0..opts.nbits).map(|b| format!("fp_{b}")));
    let width = labels.len();
    let mut data = vec![0.0; records.len() * width];
    data.par_chunks_mut(width.max(1))
        .zip(records.par_iter().zip(&fingerprints))
        .for_each(|(row, (r, fp))| {
            row[..desc_len].copy_from_slice(&descriptors[r.receptor.residues()].values);
            for b in fp.ones() {
                row[desc_len + b as usize] = 1.0;
            }
        });

    Ok(FeatureMatrix {
        ids: records.iter().map(|r| r.pair_key.to_string()).collect(),
        y: records.iter().map(|r| r.log_ki).collect(),
        x: Matrix::new(records.len(), width, data).expect("row-major buffer sized to shape"),
        labels,
        fingerprints,
    })
}

/// One uniform histogram bin `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Counts of `log_ki` in bins `[k w, (k + 1) w)` spanning the data.
pub fn affinity_histogram(d: &Dataset, bin_width: f64) -> Result<Vec<HistogramBin>, DatasetError> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(DatasetError::BadBinWidth(bin_width));
    }
    if d.is_empty() {
        return Err(DatasetError::Empty);
    }
    let index = |v: f64| (v / bin_width).floor() as i64;
    let lo = d.records.iter().map(|r| index(r.log_ki)).min().unwrap();
    let hi = d.records.iter().map(|r| index(r.log_ki)).max().unwrap();
    let mut bins: Vec<HistogramBin> = (lo..=hi)
        .map(|k| HistogramBin { lo: k as f64 * bin_width, hi: (k + 1) as f64 * bin_width, count: 0 })
        .collect();
    for r in &d.records {
        bins[(index(r.log_ki) - lo) as usize].count += 1;
    }
    Ok(bins)
}
