use crate::fasta::ProteinSequence;

use super::table::{residue_weights, Property, ResiduePropertyTable, STANDARD_RESIDUES};
use super::ProteinError;

/// Per-residue properties carried on receptor graph nodes.
pub const NODE_PROPERTIES: [Property; 9] = [
    Property::Charge,
    Property::Flexibility,
    Property::HbondDonors,
    Property::HbondAcceptors,
    Property::Hydrophobicity,
    Property::AccessibleArea,
    Property::MolecularWeight,
    Property::Polarity,
    Property::VdwVolume,
];

/// Chain graph of a receptor: one node per residue, edges between neighbours.
/// Peptide bonds are all alike, so edges carry no features.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceptorGraphFeatures {
    pub node_features: Vec<Vec<f64>>,
    pub edge_list: Vec<(usize, usize)>,
}

pub fn receptor_node_feature_names() -> Vec<String> {
    NODE_PROPERTIES
        .iter()
        .map(|p| p.name().to_string())
        .chain(STANDARD_RESIDUES.chars().map(|c| format!("residue_{c}")))
        .collect()
}

pub fn receptor_graph_features(
    table: &ResiduePropertyTable,
    seq: &ProteinSequence,
) -> Result<ReceptorGraphFeatures, ProteinError> {
    graph_for_residues(table, seq.residues())
}

/// Ambiguity codes get fractional residue indicators (B = 0.5 D + 0.5 N, ...).
pub fn graph_for_residues(
    table: &ResiduePropertyTable,
    residues: &str,
) -> Result<ReceptorGraphFeatures, ProteinError> {
    if residues.is_empty() {
        return Err(ProteinError::EmptySequence);
    }
    let node_features = residues
        .chars()
        .map(|c| {
            let props = table.residue_properties(c)?;
            let mut row: Vec<f64> = NODE_PROPERTIES.iter().map(|p| props[p.index()]).collect();
            let mut indicator = [0.0; 20];
            for (i, w) in residue_weights(c)? {
                indicator[i] += w;
            }
            row.extend(indicator);
            Ok(row)
        })
        .collect::<Result<Vec<_>, ProteinError>>()?;
    let edge_list = (1..node_features.len()).map(|i| (i - 1, i)).collect();
    Ok(ReceptorGraphFeatures { node_features, edge_list })
}
