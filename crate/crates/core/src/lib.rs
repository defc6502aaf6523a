//! Coordinate-free receptor-ligand featurization and binding-affinity regression.
//!
//! Ligands come in as SMILES and receptors as FASTA. Ligands become ECFP
//! fingerprints or heavy-atom graphs, receptors become residue-property
//! descriptors or chain graphs, and a least-squares GBDT regresses log10 Ki.

pub mod chem;
pub mod config;
pub mod dataset;
pub mod eval;
pub mod export;
pub mod fasta;
pub mod gbdt;
pub mod hash;
pub mod ligand;
pub mod pipeline;
pub mod protein;

pub use chem::Molecule;
pub use config::PipelineConfig;
pub use dataset::{AffinityRecord, Dataset, Split};
pub use eval::EvalReport;
pub use fasta::ProteinSequence;
pub use gbdt::{GbdtModel, Matrix, TrainParams};
pub use ligand::Fingerprint;
pub use protein::{ReceptorDescriptor, ResiduePropertyTable};
