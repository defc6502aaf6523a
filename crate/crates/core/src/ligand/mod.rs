//! Ligand featurization: circular fingerprints and graph-network inputs.

mod ecfp;
mod graph;

pub use ecfp::{
    atom_invariant, circular_environments, ecfp, molecular_hash, CircularEnvironment, Fingerprint,
    DEFAULT_NBITS, DEFAULT_RADIUS,
};
pub use graph::{
    edge_feature_names, infer_hybridization, ligand_graph_features, node_feature_names,
    node_one_hot_groups, Hybridization, LigandGraphFeatures,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("molecule has not been annotated with hydrogens and rings")]
    NotAnnotated,
    #[error("fingerprint width {0} is not a power of two")]
    InvalidNbits(u32),
}
