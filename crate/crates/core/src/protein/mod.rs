//! Receptor featurization from sequence alone.

mod descriptor;
mod graph;
mod table;

pub use descriptor::{
    descriptor_for_residues, descriptor_labels, receptor_descriptor, ReceptorDescriptor,
    DESCRIPTOR_LEN, STATS,
};
pub use graph::{
    graph_for_residues, receptor_graph_features, receptor_node_feature_names,
    ReceptorGraphFeatures, NODE_PROPERTIES,
};
pub use table::{
    residue_weights, Property, PropertyRecord, ResiduePropertyTable, PROPERTY_COUNT,
    STANDARD_RESIDUES,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProteinError {
    #[error("unknown residue {0:?}")]
    UnknownResidue(char),
    #[error("empty sequence")]
    EmptySequence,
    #[error("property table: {0}")]
    Table(String),
}
