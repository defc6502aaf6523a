use std::path::Path;
use std::sync::OnceLock;

use super::ProteinError;

/// Standard residues in table row order.
pub const STANDARD_RESIDUES: &str = "ACDEFGHIKLMNPQRSTVWY";

const BUILTIN_TABLE: &str = include_str!("../../data/residue_properties.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Property {
    Charge,
    VdwVolume,
    AccessibleArea,
    BuriedArea,
    Flexibility,
    FoldingIndex,
    Hydrophobicity,
    IsoelectricPoint,
    Polarity,
    Refractivity,
    Aliphatic,
    HbondDonors,
    HbondAcceptors,
    MolecularWeight,
}

pub const PROPERTY_COUNT: usize = 14;

impl Property {
    pub const ALL: [Property; PROPERTY_COUNT] = [
        Property::Charge,
        Property::VdwVolume,
        Property::AccessibleArea,
        Property::BuriedArea,
        Property::Flexibility,
        Property::FoldingIndex,
        Property::Hydrophobicity,
        Property::IsoelectricPoint,
        Property::Polarity,
        Property::Refractivity,
        Property::Aliphatic,
        Property::HbondDonors,
        Property::HbondAcceptors,
        Property::MolecularWeight,
    ];

    /// Column name in the property CSV.
    pub fn name(self) -> &'static str {
        match self {
            Property::Charge => "charge",
            Property::VdwVolume => "vdw_volume",
            Property::AccessibleArea => "accessible_area",
            Property::BuriedArea => "buried_area",
            Property::Flexibility => "flexibility",
            Property::FoldingIndex => "folding_index",
            Property::Hydrophobicity => "hydrophobicity",
            Property::IsoelectricPoint => "isoelectric_point",
            Property::Polarity => "polarity",
            Property::Refractivity => "refractivity",
            Property::Aliphatic => "aliphatic",
            Property::HbondDonors => "hbond_donors",
            Property::HbondAcceptors => "hbond_acceptors",
            Property::MolecularWeight => "molecular_weight",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

pub type PropertyRecord = [f64; PROPERTY_COUNT];

/// Per-residue physico-chemical scales for the 20 standard residues.
#[derive(Debug, Clone, PartialEq)]
pub struct ResiduePropertyTable {
    rows: [PropertyRecord; 20],
}

/// Mixture weights over standard residues for an accepted residue letter.
/// X spreads evenly, B splits D/N, Z splits E/Q, U stands in for C.
pub fn residue_weights(code: char) -> Result<Vec<(usize, f64)>, ProteinError> {
    let idx = |c: char| STANDARD_RESIDUES.find(c).expect("standard residue");
    match code.to_ascii_uppercase() {
        'X' => Ok((0..20).map(|i| (i, 1.0 / 20.0)).collect()),
        'B' => Ok(vec![(idx('D'), 0.5), (idx('N'), 0.5)]),
        'Z' => Ok(vec![(idx('E'), 0.5), (idx('Q'), 0.5)]),
        'U' => Ok(vec![(idx('C'), 1.0)]),
        c => match STANDARD_RESIDUES.find(c) {
            Some(i) => Ok(vec![(i, 1.0)]),
            None => Err(ProteinError::UnknownResidue(code)),
        },
    }
}

impl ResiduePropertyTable {
    /// The table shipped with the crate.
    pub fn builtin() -> &'static ResiduePropertyTable {
        static TABLE: OnceLock<ResiduePropertyTable> = OnceLock::new();
        TABLE.get_or_init(|| ResiduePropertyTable::from_csv(BUILTIN_TABLE).expect("builtin table parses"))
    }

    pub fn from_path(path: &Path) -> Result<Self, ProteinError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ProteinError::Table(format!("{}: {e}", path.display())))?;
        Self::from_csv(&text)
    }

    /// Parses the CSV format: `#` comment lines, a header `residue,<14 properties>`,
    /// then exactly one row per standard residue.
    pub fn from_csv(text: &str) -> Result<Self, ProteinError> {
        let bad = |msg: String| ProteinError::Table(msg);
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
        let expected: Vec<&str> =
            std::iter::once("residue").chain(Property::ALL.iter().map(|p| p.name())).collect();
        if header.iter().collect::<Vec<_>>() != expected {
            return Err(bad(format!("header must be {}", expected.join(","))));
        }
        let mut rows = [[f64::NAN; PROPERTY_COUNT]; 20];
        let mut seen = [false; 20];
        for record in reader.records() {
            let record = record.map_err(|e| bad(e.to_string()))?;
            let residue = record.get(0).unwrap_or("");
            let mut chars = residue.chars();
            let (Some(c), None) = (chars.next(), chars.next()) else {
                return Err(bad(format!("bad residue field {residue:?}")));
            };
            let i = STANDARD_RESIDUES
                .find(c.to_ascii_uppercase())
                .ok_or_else(|| bad(format!("{c:?} is not a standard residue")))?;
            if seen[i] {
                return Err(bad(format!("duplicate row for {c}")));
            }
            seen[i] = true;
            for (k, field) in record.iter().skip(1).enumerate() {
                let v: f64 = field
                    .parse()
                    .map_err(|_| bad(format!("{c}: bad value {field:?}")))?;
                if !v.is_finite() {
                    return Err(bad(format!("{c}: non-finite value")));
                }
                rows[i][k] = v;
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(bad(format!("missing row for {}", &STANDARD_RESIDUES[i..=i])));
        }
        Ok(ResiduePropertyTable { rows })
    }

    pub fn standard_row(&self, index: usize) -> &PropertyRecord {
        &self.rows[index]
    }

    /// Property record for any accepted residue letter.
    pub fn residue_properties(&self, code: char) -> Result<PropertyRecord, ProteinError> {
        let mut out = [0.0; PROPERTY_COUNT];
        for (i, w) in residue_weights(code)? {
            for (o, v) in out.iter_mut().zip(&self.rows[i]) {
                *o += w * v;
            }
        }
        Ok(out)
    }

    pub fn value(&self, code: char, property: Property) -> Result<f64, ProteinError> {
        Ok(self.residue_properties(code)?[property.index()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_values() {
        let t = ResiduePropertyTable::builtin();
        assert_eq!(t.value('G', Property::Hydrophobicity).unwrap(), -0.4);
        assert_eq!(t.value('K', Property::Charge).unwrap(), 1.0);
        assert_eq!(t.value('D', Property::Charge).unwrap(), -1.0);
        assert_eq!(t.value('I', Property::Aliphatic).unwrap(), 1.0);
        assert_eq!(t.value('F', Property::Aliphatic).unwrap(), 0.0);
    }

    #[test]
    fn ambiguity_codes() {
        let t = ResiduePropertyTable::builtin();
        let d = t.residue_properties('D').unwrap();
        let n = t.residue_properties('N').unwrap();
        let b = t.residue_properties('B').unwrap();
        for k in 0..PROPERTY_COUNT {
            assert!((b[k] - (d[k] + n[k]) / 2.0).abs() < 1e-12);
        }
        assert_eq!(t.residue_properties('U').unwrap(), t.residue_properties('C').unwrap());
        let x = t.residue_properties('X').unwrap();
        let mean_kd: f64 = STANDARD_RESIDUES
            .chars()
            .map(|c| t.value(c, Property::Hydrophobicity).unwrap())
            .sum::<f64>()
            / 20.0;
        assert!((x[Property::Hydrophobicity.index()] - mean_kd).abs() < 1e-12);
        assert_eq!(t.residue_properties('J').unwrap_err(), ProteinError::UnknownResidue('J'));
    }

    #[test]
    fn malformed_tables_rejected() {
        assert!(ResiduePropertyTable::from_csv("residue,charge\nA,0\n").is_err());
        let mut lines: Vec<&str> = BUILTIN_TABLE.lines().collect();
        lines.pop();
        assert!(ResiduePropertyTable::from_csv(&lines.join("\n")).is_err());
        let dup = format!("{BUILTIN_TABLE}{}\n", BUILTIN_TABLE.lines().last().unwrap());
        assert!(ResiduePropertyTable::from_csv(&dup).is_err());
    }
}
