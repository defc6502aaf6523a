//! Least-squares gradient boosting on depth-limited regression trees.

mod binning;
mod model;
mod params;
mod train;

pub use model::{Child, GbdtModel, SplitNode, Tree, MODEL_VERSION};
pub use params::{Splitter, TrainParams};
pub use train::{train, IterationMetrics, TrainReport};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GbdtError {
    #[error("invalid training parameters: {0}")]
    InvalidParams(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("need at least 2 training rows, got {0}")]
    TooFewRows(usize),
    #[error("non-finite {0}")]
    NonFinite(String),
    #[error("model format version {found} is not supported (reader version {expected})")]
    VersionMismatch { found: String, expected: u32 },
    #[error("corrupt model: {0}")]
    CorruptModel(String),
    #[error("{0}")]
    Io(String),
}

/// Dense row-major feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(n_rows: usize, n_cols: usize, data: Vec<f64>) -> Result<Self, GbdtError> {
        if n_rows.checked_mul(n_cols) != Some(data.len()) {
            return Err(GbdtError::DimensionMismatch { expected: n_rows * n_cols, found: data.len() });
        }
        Ok(Matrix { n_rows, n_cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, GbdtError> {
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * n_cols);
        for r in rows {
            if r.len() != n_cols {
                return Err(GbdtError::DimensionMismatch { expected: n_cols, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { n_rows: rows.len(), n_cols, data })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n_cols + col]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.n_rows).map(move |i| self.row(i))
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_rows).map(move |i| self.get(i, col))
    }

    /// Rows selected by index, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.n_cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix { n_rows: idx.len(), n_cols: self.n_cols, data }
    }
}
