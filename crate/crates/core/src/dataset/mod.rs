//! Affinity dataset curation: ingest, dedup, split and pairwise featurization.

mod featurize;
mod ingest;
mod io;
mod split;

pub use featurize::{affinity_histogram, featurize_pairs, FeatureMatrix, FeaturizeOptions, HistogramBin};
pub use ingest::{
    deduplicate, ingest, pair_key, read_raw_tsv, KiBounds, RawRecord, ReceptorResolver, RAW_HEADER,
};
pub use io::{read_dataset_dir, write_dataset_dir, DATASET_FILE, HISTOGRAM_FILE, PROVENANCE_FILE};
pub use split::{split, split_counts, Ratios, SPLIT_PRNG};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chem::Molecule;
use crate::fasta::ProteinSequence;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("no records left after filtering")]
    EmptyAfterFiltering,
    #[error("need at least 3 records to split, got {0}")]
    TooFewRecords(usize),
    #[error("invalid Ki bounds: {0}")]
    BadBounds(String),
    #[error("invalid split ratios: {0}")]
    BadRatios(String),
    #[error("invalid histogram bin width {0}")]
    BadBinWidth(f64),
    #[error("empty dataset")]
    Empty,
    #[error("line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error("record {id}: {reason}")]
    Featurize { id: String, reason: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl DatasetError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        DatasetError::Io { path: path.display().to_string(), source }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
    Unassigned,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
            Split::Unassigned => "unassigned",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "train" => Ok(Split::Train),
            "valid" => Ok(Split::Valid),
            "test" => Ok(Split::Test),
            "unassigned" => Ok(Split::Unassigned),
            _ => Err(format!("unknown split {s:?}")),
        }
    }
}

/// Which records to featurize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subset {
    Only(Split),
    All,
}

impl Subset {
    pub fn contains(self, s: Split) -> bool {
        match self {
            Subset::All => true,
            Subset::Only(x) => x == s,
        }
    }
}

impl FromStr for Subset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "all" {
            Ok(Subset::All)
        } else {
            s.parse().map(Subset::Only)
        }
    }
}

/// Order-independent identity of a receptor-ligand pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairKey(pub u64);

impl fmt::Display for PairKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

impl FromStr for PairKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.len() != 16 {
            return Err(format!("pair key {s:?} is not 16 hex digits"));
        }
        u64::from_str_radix(s, 16).map(PairKey).map_err(|e| format!("pair key {s:?}: {e}"))
    }
}

#[derive(Debug, Clone)]
pub struct AffinityRecord {
    pub receptor: ProteinSequence,
    pub ligand_smiles: String,
    pub ligand: Molecule,
    /// Decimal log of Ki in nM.
    pub log_ki: f64,
    pub pair_key: PairKey,
    pub split: Split,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source_sha256: Option<String>,
    pub config_sha256: Option<String>,
    pub input_rows: usize,
    /// Records dropped, by reason.
    pub dropped: BTreeMap<String, usize>,
    pub duplicates_merged: usize,
    pub records: usize,
    pub ki_bounds_nm: Option<KiBounds>,
    pub split_prng: Option<String>,
    pub seed: Option<u64>,
    pub ratios: Option<[f64; 3]>,
    /// Train/valid/test counts.
    pub split_counts: Option<[usize; 3]>,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub records: Vec<AffinityRecord>,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn subset(&self, which: Subset) -> impl Iterator<Item = &AffinityRecord> {
        self.records.iter().filter(move |r| which.contains(r.split))
    }
}
