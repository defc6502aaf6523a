//! Curated dataset directory: `dataset.tsv`, `provenance.json`, `histogram.csv`.

use std::fmt::Write as _;
use std::path::Path;

use super::{affinity_histogram, pair_key, AffinityRecord, Dataset, DatasetError, Provenance};
use crate::chem::Molecule;
use crate::fasta::ProteinSequence;

pub const DATASET_FILE: &str = "dataset.tsv";
pub const PROVENANCE_FILE: &str = "provenance.json";
pub const HISTOGRAM_FILE: &str = "histogram.csv";

const HEADER: &str = "pair_key\treceptor_id\treceptor_sequence\tligand_smiles\tlog_ki\tsplit";

fn write(path: &Path, text: &str) -> Result<(), DatasetError> {
    std::fs::write(path, text).map_err(|e| DatasetError::io(path, e))
}

pub fn write_dataset_dir(dir: &Path, d: &Dataset, histogram_bin_width: f64) -> Result<(), DatasetError> {
    std::fs::create_dir_all(dir).map_err(|e| DatasetError::io(dir, e))?;
    let mut tsv = String::from(HEADER);
    tsv.push('\n');
    for r in &d.records {
        // `{}` on f64 prints the shortest string that reads back bit-exactly
        writeln!(
            tsv,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.pair_key,
            r.receptor.id(),
            r.receptor.residues(),
            r.ligand_smiles,
            r.log_ki,
            r.split
        )
        .unwrap();
    }
    write(&dir.join(DATASET_FILE), &tsv)?;

    let mut json = serde_json::to_string_pretty(&d.provenance).expect("provenance serializes");
    json.push('\n');
    write(&dir.join(PROVENANCE_FILE), &json)?;

    let mut csv = String::from("lo,hi,count\n");
    for b in affinity_histogram(d, histogram_bin_width)? {
        writeln!(csv, "{},{},{}", b.lo, b.hi, b.count).unwrap();
    }
    write(&dir.join(HISTOGRAM_FILE), &csv)
}

pub fn read_dataset_dir(dir: &Path) -> Result<Dataset, DatasetError> {
    let path = dir.join(DATASET_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| DatasetError::io(&path, e))?;
    let mut lines = text.lines().enumerate();
    let bad = |line: usize, reason: String| DatasetError::Format { line: line + 1, reason };
    match lines.next() {
        Some((_, h)) if h.trim_end_matches('\r') == HEADER => {}
        _ => return Err(bad(0, format!("{} does not start with the dataset header", path.display()))),
    }
    let mut records = Vec::new();
    for (i, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 6 {
            return Err(bad(i, format!("expected 6 fields, found {}", f.len())));
        }
        let receptor = ProteinSequence::new(f[1], f[2]).map_err(|e| bad(i, e.to_string()))?;
        let ligand = Molecule::from_smiles(f[3]).map_err(|e| bad(i, e.to_string()))?;
        let key = pair_key(&receptor, &ligand).map_err(|e| bad(i, e.to_string()))?;
        if key.to_string() != f[0] {
            return Err(bad(i, format!("pair key {} does not match the pair (expected {key})", f[0])));
        }
        let log_ki: f64 = f[4].parse().map_err(|_| bad(i, format!("bad log_ki {:?}", f[4])))?;
        if !log_ki.is_finite() {
            return Err(bad(i, "non-finite log_ki".into()));
        }
        let split = f[5].parse().map_err(|e| bad(i, e))?;
        records.push(AffinityRecord { receptor, ligand_smiles: f[3].to_string(), ligand, log_ki, pair_key: key, split });
    }
    let ppath = dir.join(PROVENANCE_FILE);
    let provenance: Provenance = match std::fs::read_to_string(&ppath) {
        Ok(text) => serde_json::from_str(&text).map_err(|e| DatasetError::Format { line: 0, reason: format!("{}: {e}", ppath.display()) })?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Provenance::default(),
        Err(e) => return Err(DatasetError::io(&ppath, e)),
    };
    Ok(Dataset { records, provenance })
}
