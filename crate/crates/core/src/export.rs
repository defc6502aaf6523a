//! Batch export formats for fingerprints and graphs.
//!
//! Binary fingerprint layout (`.afsf`): the magic bytes `AFSF`, `u32` nbits and
//! `u32` row count (both little-endian), then each row as `ceil(nbits / 8)`
//! bytes with bit `i` stored in byte `i / 8` at position `i % 8` (LSB first).

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ligand::Fingerprint;

pub const FINGERPRINT_MAGIC: &[u8; 4] = b"AFSF";

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("fingerprint rows have mixed widths ({0} and {1})")]
    MixedWidths(u32, u32),
    #[error("not a fingerprint file: {0}")]
    BadFormat(&'static str),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// CSV with header `id,b0,...,b{n-1}` and one 0/1 row per fingerprint.
pub fn write_fingerprint_csv<W: Write>(mut w: W, rows: &[(String, Fingerprint)]) -> Result<(), ExportError> {
    let nbits = common_width(rows.iter().map(|(_, fp)| fp))?;
    let mut line = String::from("id");
    for b in 0..nbits {
        line.push_str(",b");
        line.push_str(&b.to_string());
    }
    writeln!(w, "{line}")?;
    for (id, fp) in rows {
        line.clear();
        line.push_str(id);
        for b in 0..nbits {
            line.push_str(if fp.get(b) { ",1" } else { ",0" });
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

fn common_width<'a>(mut fps: impl Iterator<Item = &'a Fingerprint>) -> Result<u32, ExportError> {
    let Some(first) = fps.next() else { return Ok(0) };
    let n = first.nbits();
    for fp in fps {
        if fp.nbits() != n {
            return Err(ExportError::MixedWidths(n, fp.nbits()));
        }
    }
    Ok(n)
}

pub fn write_fingerprint_binary<W: Write>(mut w: W, fps: &[Fingerprint]) -> Result<(), ExportError> {
    let nbits = common_width(fps.iter())?;
    w.write_all(FINGERPRINT_MAGIC)?;
    w.write_all(&nbits.to_le_bytes())?;
    w.write_all(&(fps.len() as u32).to_le_bytes())?;
    let row_bytes = (nbits as usize).div_ceil(8);
    let mut row = vec![0u8; row_bytes];
    for fp in fps {
        row.fill(0);
        for b in fp.ones() {
            row[(b / 8) as usize] |= 1 << (b % 8);
        }
        w.write_all(&row)?;
    }
    Ok(())
}

pub fn read_fingerprint_binary(bytes: &[u8]) -> Result<Vec<Fingerprint>, ExportError> {
    if bytes.len() < 12 || &bytes[..4] != FINGERPRINT_MAGIC {
        return Err(ExportError::BadFormat("missing AFSF header"));
    }
    let nbits = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    let rows = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let row_bytes = (nbits as usize).div_ceil(8);
    let body = &bytes[12..];
    if body.len() != rows * row_bytes {
        return Err(ExportError::BadFormat("body length does not match header"));
    }
    Ok(body
        .chunks(row_bytes.max(1))
        .take(rows)
        .map(|chunk| {
            let mut fp = Fingerprint::empty(nbits, 0);
            for b in 0..nbits {
                if chunk[(b / 8) as usize] >> (b % 8) & 1 == 1 {
                    fp.set(b);
                }
            }
            fp
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureNames {
    pub node: Vec<String>,
    pub edge: Vec<String>,
}

/// One JSON-lines record of graph export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphLine {
    pub id: String,
    pub node_features: Vec<Vec<f64>>,
    pub edge_list: Vec<(usize, usize)>,
    pub edge_features: Vec<Vec<f64>>,
    pub feature_names: FeatureNames,
}

pub fn write_graph_line<W: Write>(mut w: W, line: &GraphLine) -> Result<(), ExportError> {
    serde_json::to_writer(&mut w, line)?;
    w.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::Molecule;
    use crate::ligand::ecfp;

    fn fps() -> Vec<Fingerprint> {
        ["CCO", "c1ccccc1", "CC(=O)Nc1ccc(O)cc1"]
            .iter()
            .map(|s| ecfp(&Molecule::from_smiles(s).unwrap(), 2, 256).unwrap())
            .collect()
    }

    #[test]
    fn binary_round_trip() {
        let fps = fps();
        let mut buf = Vec::new();
        write_fingerprint_binary(&mut buf, &fps).unwrap();
        assert_eq!(&buf[..4], b"AFSF");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 256);
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 3);
        assert_eq!(buf.len(), 12 + 3 * 32);
        let back = read_fingerprint_binary(&buf).unwrap();
        for (a, b) in fps.iter().zip(&back) {
            assert_eq!(a.ones().collect::<Vec<_>>(), b.ones().collect::<Vec<_>>());
        }
        assert!(read_fingerprint_binary(&buf[..20]).is_err());
    }

    #[test]
    fn bit_packing_is_lsb_first() {
        let mut fp = Fingerprint::empty(16, 2);
        fp.set(0);
        fp.set(9);
        let mut buf = Vec::new();
        write_fingerprint_binary(&mut buf, &[fp]).unwrap();
        assert_eq!(&buf[12..], &[0b0000_0001, 0b0000_0010]);
    }

    #[test]
    fn csv_layout() {
        let rows: Vec<(String, Fingerprint)> =
            fps().into_iter().enumerate().map(|(i, f)| (format!("m{i}"), f)).collect();
        let mut buf = Vec::new();
        write_fingerprint_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("id,b0,b1,"));
        assert_eq!(lines[1].split(',').count(), 257);
        let ones = lines[1].split(',').skip(1).filter(|v| *v == "1").count() as u32;
        assert_eq!(ones, rows[0].1.popcount());
    }

    #[test]
    fn mixed_widths_rejected() {
        let a = Fingerprint::empty(64, 2);
        let b = Fingerprint::empty(128, 2);
        assert!(matches!(write_fingerprint_binary(Vec::new(), &[a, b]), Err(ExportError::MixedWidths(64, 128))));
    }
}
