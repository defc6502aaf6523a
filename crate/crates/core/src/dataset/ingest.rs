use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AffinityRecord, Dataset, DatasetError, PairKey, Provenance, Split};
use crate::chem::Molecule;
use crate::fasta::{parse_fasta, ProteinSequence};
use crate::hash::{fnv1a64, Fnv1a64};
use crate::ligand::{molecular_hash, FeatureError};

pub const RAW_HEADER: [&str; 3] = ["receptor_fasta", "ligand_smiles", "ki_nm"];

/// One input row, still as text. `receptor` is an inline residue string or
/// `@path:ID` naming a record in a FASTA file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRecord {
    pub line: usize,
    pub receptor: String,
    pub ligand: String,
    pub ki_nm: String,
}

/// Reads the raw TSV. Rows without exactly three fields are returned
/// separately by line number so the caller can tally them.
pub fn read_raw_tsv(text: &str) -> Result<(Vec<RawRecord>, Vec<usize>), DatasetError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((_, header)) = lines.next() else {
        return Err(DatasetError::Format { line: 1, reason: "missing header".into() });
    };
    let fields: Vec<&str> = header.trim_end_matches('\r').split('\t').map(str::trim).collect();
    if fields != RAW_HEADER {
        return Err(DatasetError::Format {
            line: 1,
            reason: format!("expected header {:?}, found {:?}", RAW_HEADER.join("\t"), fields.join("\t")),
        });
    }
    let mut records = Vec::new();
    let mut malformed = Vec::new();
    for (i, line) in lines {
        let f: Vec<&str> = line.trim_end_matches('\r').split('\t').map(str::trim).collect();
        if f.len() != 3 || f.iter().any(|s| s.is_empty()) {
            malformed.push(i + 1);
            continue;
        }
        records.push(RawRecord { line: i + 1, receptor: f[0].into(), ligand: f[1].into(), ki_nm: f[2].into() });
    }
    Ok((records, malformed))
}

/// Accepted Ki range in nM; values outside are treated as nonphysical.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KiBounds {
    pub min: f64,
    pub max: f64,
}

impl Default for KiBounds {
    fn default() -> Self {
        KiBounds { min: 1e-3, max: 1e10 }
    }
}

impl KiBounds {
    pub fn validate(&self) -> Result<(), DatasetError> {
        if !(self.min > 0.0 && self.min.is_finite() && self.max.is_finite() && self.min <= self.max) {
            return Err(DatasetError::BadBounds(format!("need 0 < min <= max, got [{}, {}]", self.min, self.max)));
        }
        Ok(())
    }

    pub fn contains(&self, ki: f64) -> bool {
        ki >= self.min && ki <= self.max
    }
}

/// Resolves receptor fields, caching FASTA files referenced with `@path:ID`.
#[derive(Debug, Default)]
pub struct ReceptorResolver {
    base_dir: PathBuf,
    files: HashMap<PathBuf, Result<HashMap<String, ProteinSequence>, String>>,
}

impl ReceptorResolver {
    /// Relative FASTA paths are taken relative to `base_dir`.
    pub fn new(base_dir: impl Into<PathBuf>) -> Self {
        ReceptorResolver { base_dir: base_dir.into(), files: HashMap::new() }
    }

    pub fn resolve(&mut self, field: &str) -> Result<ProteinSequence, String> {
        let Some(reference) = field.strip_prefix('@') else {
            let id = format!("seq_{:016x}", fnv1a64(field.to_ascii_uppercase().as_bytes()));
            return ProteinSequence::new(id, field).map_err(|e| e.to_string());
        };
        let (path, id) = reference
            .rsplit_once(':')
            .ok_or_else(|| format!("receptor reference {field:?} is not of the form @path:ID"))?;
        let path = self.base_dir.join(Path::new(path));
        let records = self.files.entry(path.clone()).or_insert_with(|| {
            let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            let records = parse_fasta(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            Ok(records.into_iter().map(|r| (r.id().to_string(), r)).collect())
        });
        match records {
            Ok(map) => map.get(id).cloned().ok_or_else(|| format!("no record {id:?} in {}", path.display())),
            Err(e) => Err(e.clone()),
        }
    }
}

/// Residue string and molecular graph hash, so reordered SMILES of one
/// compound give the same key.
pub fn pair_key(receptor: &ProteinSequence, ligand: &Molecule) -> Result<PairKey, FeatureError> {
    let mut h = Fnv1a64::default();
    h.write(receptor.residues().as_bytes());
    h.write(&[0xff]);
    h.write(&molecular_hash(ligand)?.to_le_bytes());
    Ok(PairKey(h.finish()))
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Collapses records sharing a pair key into the first occurrence, labelled
/// with the median `log_ki` of the group. Returns the number of records merged away.
pub fn deduplicate(records: Vec<AffinityRecord>) -> (Vec<AffinityRecord>, usize) {
    let mut index: HashMap<PairKey, usize> = HashMap::new();
    let mut groups: Vec<(AffinityRecord, Vec<f64>)> = Vec::new();
    for r in records {
        match index.get(&r.pair_key) {
            Some(&g) => groups[g].1.push(r.log_ki),
            None => {
                index.insert(r.pair_key, groups.len());
                let v = vec![r.log_ki];
                groups.push((r, v));
            }
        }
    }
    let mut merged = 0;
    let out = groups
        .into_iter()
        .map(|(mut r, mut values)| {
            if values.len() > 1 {
                merged += values.len() - 1;
                r.log_ki = median(&mut values);
            }
            r
        })
        .collect();
    (out, merged)
}

enum Parsed {
    Kept(Box<AffinityRecord>),
    Dropped(&'static str),
}

/// Parses, filters and deduplicates raw rows. Per-row failures are tallied
/// in the provenance by reason; only an empty result is an error.
pub fn ingest(
    raw: &[RawRecord],
    bounds: KiBounds,
    resolver: &mut ReceptorResolver,
) -> Result<Dataset, DatasetError> {
    bounds.validate()?;
    let receptors: Vec<Result<ProteinSequence, String>> = raw.iter().map(|r| resolver.resolve(&r.receptor)).collect();
    let parsed: Vec<Parsed> = raw
        .par_iter()
        .zip(receptors)
        .map(|(r, receptor)| {
            let Ok(receptor) = receptor else {
                log::debug!("line {}: unusable receptor", r.line);
                return Parsed::Dropped("receptor");
            };
            let Ok(ki) = r.ki_nm.parse::<f64>() else {
                return Parsed::Dropped("ki_unparseable");
            };
            if !ki.is_finite() || !bounds.contains(ki) {
                return Parsed::Dropped("ki_nonphysical");
            }
            let ligand = match Molecule::from_smiles(&r.ligand) {
                Ok(m) => m,
                Err(e) => {
                    log::debug!("line {}: {e}", r.line);
                    return Parsed::Dropped("ligand");
                }
            };
            let Ok(key) = pair_key(&receptor, &ligand) else {
                return Parsed::Dropped("ligand");
            };
            Parsed::Kept(Box::new(AffinityRecord {
                receptor,
                ligand_smiles: r.ligand.clone(),
                ligand,
                log_ki: ki.log10(),
                pair_key: key,
                split: Split::Unassigned,
            }))
        })
        .collect();

    let mut dropped: BTreeMap<String, usize> = BTreeMap::new();
    let mut kept = Vec::with_capacity(parsed.len());
    for p in parsed {
        match p {
            Parsed::Kept(r) => kept.push(*r),
            Parsed::Dropped(reason) => *dropped.entry(reason.to_string()).or_default() += 1,
        }
    }
    let (records, duplicates_merged) = deduplicate(kept);
    if records.is_empty() {
        return Err(DatasetError::EmptyAfterFiltering);
    }
    for (reason, n) in &dropped {
        log::info!("dropped {n} record(s): {reason}");
    }
    let provenance = Provenance {
        input_rows: raw.len(),
        dropped,
        duplicates_merged,
        records: records.len(),
        ki_bounds_nm: Some(bounds),
        ..Provenance::default()
    };
    Ok(Dataset { records, provenance })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(rows: &[(&str, &str, &str)]) -> Vec<RawRecord> {
        rows.iter()
            .enumerate()
            .map(|(i, &(p, l, k))| RawRecord { line: i + 2, receptor: p.into(), ligand: l.into(), ki_nm: k.into() })
            .collect()
    }

    fn run(rows: &[(&str, &str, &str)]) -> Result<Dataset, DatasetError> {
        ingest(&raw(rows), KiBounds::default(), &mut ReceptorResolver::default())
    }

    #[test]
    fn log_conversion() {
        let d = run(&[("MKV", "CCO", "10000"), ("MKV", "CCN", "1")]).unwrap();
        assert_eq!(d.records[0].log_ki, 4.0);
        assert_eq!(d.records[1].log_ki, 0.0);
    }

    #[test]
    fn nonphysical_and_bad_rows_tallied() {
        let d = run(&[
            ("MKV", "CCO", "0"),
            ("MKV", "CCO", "-5"),
            ("MKV", "CCO", "1e12"),
            ("MKV", "CCO", "abc"),
            ("MKV", "C(C", "5"),
            ("MK1", "CCO", "5"),
            ("MKV", "CCO", "5"),
        ])
        .unwrap();
        assert_eq!(d.len(), 1);
        let p = &d.provenance;
        assert_eq!(p.dropped["ki_nonphysical"], 3);
        assert_eq!(p.dropped["ki_unparseable"], 1);
        assert_eq!(p.dropped["ligand"], 1);
        assert_eq!(p.dropped["receptor"], 1);
        assert_eq!(p.input_rows, 7);
    }

    #[test]
    fn empty_after_filtering() {
        assert!(matches!(run(&[("MKV", "CCO", "0")]), Err(DatasetError::EmptyAfterFiltering)));
    }

    #[test]
    fn duplicates_take_median() {
        let k1 = 10f64.powf(3.0).to_string();
        let k2 = 10f64.powf(3.4).to_string();
        let d = run(&[("MKV", "CCO", &k1), ("MKV", "OCC", &k2)]).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d.records[0].log_ki - 3.2).abs() < 1e-12);
        assert_eq!(d.records[0].ligand_smiles, "CCO");
        assert_eq!(d.provenance.duplicates_merged, 1);
        let mut odd = [5.0, 1.0, 3.0];
        assert_eq!(median(&mut odd), 3.0);
    }

    #[test]
    fn pair_keys() {
        let p = ProteinSequence::new("p", "MKV").unwrap();
        let q = ProteinSequence::new("q", "MKA").unwrap();
        let m = |s| Molecule::from_smiles(s).unwrap();
        assert_eq!(pair_key(&p, &m("CCO")).unwrap(), pair_key(&p, &m("OCC")).unwrap());
        assert_ne!(pair_key(&p, &m("CCO")).unwrap(), pair_key(&p, &m("CO")).unwrap());
        assert_ne!(pair_key(&p, &m("CCO")).unwrap(), pair_key(&q, &m("CCO")).unwrap());
        let k = pair_key(&p, &m("CCO")).unwrap();
        assert_eq!(k.to_string().parse::<PairKey>().unwrap(), k);
    }

    #[test]
    fn tsv_reading() {
        let text = "receptor_fasta\tligand_smiles\tki_nm\r\nMKV\tCCO\t5\r\n\nMKV\tCCO\n";
        let (rows, bad) = read_raw_tsv(text).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].line, 2);
        assert_eq!(bad, vec![4]);
        assert!(read_raw_tsv("a\tb\tc\n").is_err());
        assert!(read_raw_tsv("").is_err());
    }

    #[test]
    fn fasta_references() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("r.fasta"), ">P1 kinase\nMKVL\n>P2\nGGG\n").unwrap();
        let mut res = ReceptorResolver::new(dir.path());
        assert_eq!(res.resolve("@r.fasta:P1").unwrap().residues(), "MKVL");
        assert_eq!(res.resolve("@r.fasta:P2").unwrap().id(), "P2");
        assert!(res.resolve("@r.fasta:P3").is_err());
        assert!(res.resolve("@missing.fasta:P1").is_err());
        assert!(res.resolve("@nocolon").is_err());
        let inline = res.resolve("mkvl").unwrap();
        assert_eq!(inline.residues(), "MKVL");
        assert!(inline.id().starts_with("seq_"));
    }
}
