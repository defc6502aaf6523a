use serde::{Deserialize, Serialize};

use crate::chem::{BondOrder, Molecule};

use super::FeatureError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hybridization {
    Sp,
    Sp2,
    Sp3,
    Other,
}

/// sp: a triple bond or two double bonds. sp2: aromatic or exactly one double
/// bond. sp3: any other C, N, O, S or P. Everything else is `Other`.
pub fn infer_hybridization(m: &Molecule) -> Vec<Hybridization> {
    (0..m.atom_count())
        .map(|i| {
            let atom = &m.atoms()[i];
            let (mut doubles, mut triples) = (0, 0);
            for &(_, b) in m.neighbors(i) {
                match m.bonds()[b].order {
                    BondOrder::Double => doubles += 1,
                    BondOrder::Triple => triples += 1,
                    _ => {}
                }
            }
            if triples > 0 || doubles >= 2 {
                Hybridization::Sp
            } else if atom.aromatic || doubles == 1 {
                Hybridization::Sp2
            } else if matches!(atom.element, 6 | 7 | 8 | 15 | 16) {
                Hybridization::Sp3
            } else {
                Hybridization::Other
            }
        })
        .collect()
}

const ELEMENT_VOCAB: [(u8, &str); 10] = [
    (5, "B"),
    (6, "C"),
    (7, "N"),
    (8, "O"),
    (15, "P"),
    (16, "S"),
    (9, "F"),
    (17, "Cl"),
    (35, "Br"),
    (53, "I"),
];
const MAX_DEGREE: usize = 5;
const MAX_H: usize = 4;
const HYBRIDIZATIONS: [(Hybridization, &str); 4] = [
    (Hybridization::Sp, "sp"),
    (Hybridization::Sp2, "sp2"),
    (Hybridization::Sp3, "sp3"),
    (Hybridization::Other, "other"),
];
const BOND_VOCAB: [(BondOrder, &str); 4] = [
    (BondOrder::Single, "single"),
    (BondOrder::Double, "double"),
    (BondOrder::Triple, "triple"),
    (BondOrder::Aromatic, "aromatic"),
];

/// Column labels of ligand node features, in order.
pub fn node_feature_names() -> Vec<String> {
    let mut names: Vec<String> = ELEMENT_VOCAB.iter().map(|(_, s)| format!("element_{s}")).collect();
    names.push("element_other".into());
    names.extend((0..=MAX_DEGREE).map(|d| format!("degree_{d}")));
    names.push("formal_charge".into());
    names.extend((0..=MAX_H).map(|h| format!("total_h_{h}")));
    names.push("electrons".into());
    names.extend(HYBRIDIZATIONS.iter().map(|(_, s)| format!("hybridization_{s}")));
    names.push("aromatic".into());
    names.push("in_ring".into());
    names
}

pub fn edge_feature_names() -> Vec<String> {
    let mut names: Vec<String> = BOND_VOCAB.iter().map(|(_, s)| format!("bond_{s}")).collect();
    names.push("in_ring".into());
    names
}

/// Per-molecule GNN input: one row per heavy atom, one row per bond.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LigandGraphFeatures {
    pub node_features: Vec<Vec<f64>>,
    pub edge_list: Vec<(usize, usize)>,
    pub edge_features: Vec<Vec<f64>>,
}

impl LigandGraphFeatures {
    pub fn node_dim() -> usize {
        node_feature_names().len()
    }

    pub fn edge_dim() -> usize {
        edge_feature_names().len()
    }
}

fn one_hot(row: &mut Vec<f64>, len: usize, hot: usize) {
    row.extend((0..len).map(|i| if i == hot { 1.0 } else { 0.0 }));
}

/// Degree and H counts above the vocabulary land in the last bucket.
pub fn ligand_graph_features(m: &Molecule) -> Result<LigandGraphFeatures, FeatureError> {
    if !m.is_annotated() {
        return Err(FeatureError::NotAnnotated);
    }
    let hybrid = infer_hybridization(m);
    let node_features = m
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, atom)| {
            let mut row = Vec::with_capacity(30);
            let element = ELEMENT_VOCAB
                .iter()
                .position(|&(z, _)| z == atom.element)
                .unwrap_or(ELEMENT_VOCAB.len());
            one_hot(&mut row, ELEMENT_VOCAB.len() + 1, element);
            one_hot(&mut row, MAX_DEGREE + 1, m.degree(i).min(MAX_DEGREE));
            row.push(f64::from(atom.formal_charge));
            one_hot(&mut row, MAX_H + 1, usize::from(atom.total_h()).min(MAX_H));
            row.push(f64::from(i32::from(atom.element) - i32::from(atom.formal_charge)));
            let h = HYBRIDIZATIONS.iter().position(|&(x, _)| x == hybrid[i]).unwrap();
            one_hot(&mut row, HYBRIDIZATIONS.len(), h);
            row.push(f64::from(u8::from(atom.aromatic)));
            row.push(f64::from(u8::from(atom.in_ring)));
            row
        })
        .collect();
    let edge_list = m.bonds().iter().map(|b| (b.a, b.b)).collect();
    let edge_features = m
        .bonds()
        .iter()
        .map(|b| {
            let mut row = Vec::with_capacity(5);
            let k = BOND_VOCAB.iter().position(|&(o, _)| o == b.order).unwrap();
            one_hot(&mut row, BOND_VOCAB.len(), k);
            row.push(f64::from(u8::from(b.in_ring)));
            row
        })
        .collect();
    Ok(LigandGraphFeatures { node_features, edge_list, edge_features })
}

/// `(start, len)` column ranges of the one-hot groups in node rows.
pub fn node_one_hot_groups() -> [(usize, usize); 4] {
    let elem = (0, ELEMENT_VOCAB.len() + 1);
    let degree = (elem.1, MAX_DEGREE + 1);
    let h = (degree.0 + degree.1 + 1, MAX_H + 1);
    let hyb = (h.0 + h.1 + 1, HYBRIDIZATIONS.len());
    [elem, degree, h, hyb]
}
