//! Protein FASTA reading and writing.

use std::fmt::Write as _;

use thiserror::Error;

/// Letters accepted in residue strings: the 20 standard codes plus X, B, Z, U.
pub const PROTEIN_ALPHABET: &str = "ACDEFGHIKLMNPQRSTVWYXBZU";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FastaError {
    #[error("empty FASTA document")]
    Empty,
    #[error("sequence data on line {line} before any '>' header")]
    NoHeader { line: usize },
    #[error("header on line {line} has no identifier")]
    MissingId { line: usize },
    #[error("record {id:?} has no residues")]
    EmptyRecord { id: String },
    #[error("record {id:?}: illegal residue {residue:?} at position {position}")]
    IllegalResidue { id: String, position: usize, residue: char },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProteinSequence {
    id: String,
    residues: String,
}

impl ProteinSequence {
    /// Validates and upper-cases `residues`. Positions in errors are 1-based.
    pub fn new(id: impl Into<String>, residues: &str) -> Result<Self, FastaError> {
        let id = id.into();
        if id.is_empty() {
            return Err(FastaError::MissingId { line: 0 });
        }
        let mut out = String::with_capacity(residues.len());
        for (i, c) in residues.chars().enumerate() {
            let up = c.to_ascii_uppercase();
            if !PROTEIN_ALPHABET.contains(up) || !c.is_ascii_alphabetic() {
                return Err(FastaError::IllegalResidue { id, position: i + 1, residue: c });
            }
            out.push(up);
        }
        if out.is_empty() {
            return Err(FastaError::EmptyRecord { id });
        }
        Ok(ProteinSequence { id, residues: out })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn residues(&self) -> &str {
        &self.residues
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }
}

/// Parsed document plus the number of trailing `*` stop symbols removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastaDocument {
    pub records: Vec<ProteinSequence>,
    pub stops_stripped: usize,
}

pub fn parse_fasta(text: &str) -> Result<Vec<ProteinSequence>, FastaError> {
    parse_fasta_document(text).map(|doc| doc.records)
}

pub fn parse_fasta_document(text: &str) -> Result<FastaDocument, FastaError> {
    if text.trim().is_empty() {
        return Err(FastaError::Empty);
    }
    let mut records = Vec::new();
    let mut stops_stripped = 0;
    let mut current: Option<(String, String)> = None;

    let mut finish = |rec: Option<(String, String)>, records: &mut Vec<ProteinSequence>| {
        if let Some((id, mut seq)) = rec {
            if seq.ends_with('*') {
                while seq.ends_with('*') {
                    seq.pop();
                }
                stops_stripped += 1;
                log::warn!("stripped terminal stop symbol from record {id:?}");
            }
            records.push(ProteinSequence::new(id, &seq)?);
        }
        Ok::<(), FastaError>(())
    };

    for (lineno, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if let Some(header) = line.strip_prefix('>') {
            finish(current.take(), &mut records)?;
            let id = header.split_whitespace().next().unwrap_or("");
            if id.is_empty() {
                return Err(FastaError::MissingId { line: lineno + 1 });
            }
            current = Some((id.to_string(), String::new()));
        } else {
            let data: String = line.chars().filter(|c| !c.is_whitespace()).collect();
            if data.is_empty() {
                continue;
            }
            match current.as_mut() {
                Some((_, seq)) => seq.push_str(&data),
                None => return Err(FastaError::NoHeader { line: lineno + 1 }),
            }
        }
    }
    finish(current.take(), &mut records)?;
    Ok(FastaDocument { records, stops_stripped })
}

/// Writes records as FASTA with sequence lines wrapped at `width` (0 = no wrap).
pub fn write_fasta(records: &[ProteinSequence], width: usize) -> String {
    let mut out = String::new();
    for rec in records {
        let _ = writeln!(out, ">{}", rec.id);
        if width == 0 {
            out.push_str(&rec.residues);
            out.push('\n');
        } else {
            for chunk in rec.residues.as_bytes().chunks(width) {
                out.push_str(std::str::from_utf8(chunk).expect("ascii residues"));
                out.push('\n');
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_record() {
        let recs = parse_fasta(">p1\nMKV\n").unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].id(), "p1");
        assert_eq!(recs[0].residues(), "MKV");
    }

    #[test]
    fn wrapped_lines_concatenate() {
        assert_eq!(parse_fasta(">p1\nMK\nV\n").unwrap()[0].residues(), "MKV");
    }

    #[test]
    fn illegal_residue_position() {
        assert_eq!(
            parse_fasta(">p1\nM1K\n").unwrap_err(),
            FastaError::IllegalResidue { id: "p1".into(), position: 2, residue: '1' }
        );
        assert!(matches!(
            parse_fasta(">p1\nMKJ\n").unwrap_err(),
            FastaError::IllegalResidue { position: 3, residue: 'J', .. }
        ));
        assert!(matches!(
            parse_fasta(">p1\nMO\n").unwrap_err(),
            FastaError::IllegalResidue { residue: 'O', .. }
        ));
    }

    #[test]
    fn header_id_stops_at_whitespace() {
        let recs = parse_fasta(">sp|P00734|THRB_HUMAN Prothrombin OS=Homo sapiens\nMAHVRGLQLP\n").unwrap();
        assert_eq!(recs[0].id(), "sp|P00734|THRB_HUMAN");
    }

    #[test]
    fn crlf_lowercase_and_stops() {
        let doc = parse_fasta_document(">a\r\nmkv*\r\n>b\r\nGG\r\n").unwrap();
        assert_eq!(doc.records[0].residues(), "MKV");
        assert_eq!(doc.records[1].residues(), "GG");
        assert_eq!(doc.stops_stripped, 1);
        // an interior stop is not a terminal one
        assert!(parse_fasta(">a\nMK*V\n").is_err());
    }

    #[test]
    fn ambiguity_codes_accepted() {
        assert_eq!(parse_fasta(">a\nXBZU\n").unwrap()[0].residues(), "XBZU");
    }

    #[test]
    fn structural_errors() {
        assert_eq!(parse_fasta("").unwrap_err(), FastaError::Empty);
        assert_eq!(parse_fasta("MKV\n>p\nA").unwrap_err(), FastaError::NoHeader { line: 1 });
        assert_eq!(
            parse_fasta(">p1\n>p2\nMK\n").unwrap_err(),
            FastaError::EmptyRecord { id: "p1".into() }
        );
        assert_eq!(parse_fasta("> \nMK\n").unwrap_err(), FastaError::MissingId { line: 1 });
    }

    fn arb_records() -> impl Strategy<Value = Vec<ProteinSequence>> {
        prop::collection::vec(("[a-z0-9_]{1,8}", "[ACDEFGHIKLMNPQRSTVWYXBZU]{1,200}"), 1..6)
            .prop_map(|v| v.into_iter().map(|(id, s)| ProteinSequence::new(id, &s).unwrap()).collect())
    }

    proptest! {
        #[test]
        fn round_trip_under_any_wrapping(records in arb_records(), w1 in 0usize..80, w2 in 0usize..80) {
            let a = parse_fasta(&write_fasta(&records, w1)).unwrap();
            let b = parse_fasta(&write_fasta(&records, w2)).unwrap();
            prop_assert_eq!(&a, &records);
            prop_assert_eq!(&a, &b);
            let text = write_fasta(&records, w1);
            prop_assert_eq!(text.lines().filter(|l| l.starts_with('>')).count(), a.len());
        }
    }
}
