use crate::fasta::ProteinSequence;

use super::table::{residue_weights, Property, ResiduePropertyTable, PROPERTY_COUNT, STANDARD_RESIDUES};
use super::ProteinError;

pub const STATS: [&str; 4] = ["mean", "sum", "min", "max"];

/// Length of every receptor descriptor: 4 statistics per property,
/// 20 composition fractions, sequence length and the disulfide proxy.
pub const DESCRIPTOR_LEN: usize = PROPERTY_COUNT * STATS.len() + 20 + 2;

#[derive(Debug, Clone, PartialEq)]
pub struct ReceptorDescriptor {
    pub values: Vec<f64>,
}

impl ReceptorDescriptor {
    pub fn get(&self, label: &str) -> Option<f64> {
        descriptor_labels().iter().position(|l| l == label).map(|i| self.values[i])
    }

    pub fn stat(&self, property: Property, stat: &str) -> f64 {
        let s = STATS.iter().position(|&x| x == stat).expect("known statistic");
        self.values[property.index() * STATS.len() + s]
    }

    pub fn composition(&self) -> &[f64] {
        let start = PROPERTY_COUNT * STATS.len();
        &self.values[start..start + 20]
    }
}

pub fn descriptor_labels() -> Vec<String> {
    let mut labels = Vec::with_capacity(DESCRIPTOR_LEN);
    for p in Property::ALL {
        for s in STATS {
            labels.push(format!("{}_{s}", p.name()));
        }
    }
    labels.extend(STANDARD_RESIDUES.chars().map(|c| format!("frac_{c}")));
    labels.push("length".into());
    labels.push("disulfide_proxy".into());
    labels
}

pub fn receptor_descriptor(
    table: &ResiduePropertyTable,
    seq: &ProteinSequence,
) -> Result<ReceptorDescriptor, ProteinError> {
    descriptor_for_residues(table, seq.residues())
}

/// Per-property mean/sum/min/max, composition, length and
/// `floor(count('C') / 2)` as an upper bound on disulfide bridges.
pub fn descriptor_for_residues(
    table: &ResiduePropertyTable,
    residues: &str,
) -> Result<ReceptorDescriptor, ProteinError> {
    if residues.is_empty() {
        return Err(ProteinError::EmptySequence);
    }
    let mut sum = [0.0; PROPERTY_COUNT];
    let mut min = [f64::INFINITY; PROPERTY_COUNT];
    let mut max = [f64::NEG_INFINITY; PROPERTY_COUNT];
    let mut counts = [0.0; 20];
    let mut cysteines = 0usize;
    let mut n = 0usize;
    for c in residues.chars() {
        let props = table.residue_properties(c)?;
        for k in 0..PROPERTY_COUNT {
            sum[k] += props[k];
            min[k] = min[k].min(props[k]);
            max[k] = max[k].max(props[k]);
        }
        for (i, w) in residue_weights(c)? {
            counts[i] += w;
        }
        if c.eq_ignore_ascii_case(&'C') {
            cysteines += 1;
        }
        n += 1;
    }
    let len = n as f64;
    let mut values = Vec::with_capacity(DESCRIPTOR_LEN);
    for k in 0..PROPERTY_COUNT {
        values.extend([sum[k] / len, sum[k], min[k], max[k]]);
    }
    values.extend(counts.iter().map(|c| c / len));
    values.push(len);
    values.push((cysteines / 2) as f64);
    Ok(ReceptorDescriptor { values })
}
