//! Ligand side: SMILES parsing into annotated heavy-atom graphs.

mod molecule;
mod rings;
mod smiles;
mod valence;

pub use molecule::{atomic_number, element_symbol, valence_table, Atom, Bond, BondOrder, Molecule};
pub use rings::perceive_rings;
pub use smiles::{parse_smiles, SmilesError};
pub use valence::{assign_implicit_hydrogens, ValenceExceeded};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChemError {
    #[error(transparent)]
    Syntax(#[from] SmilesError),
    #[error(transparent)]
    Valence(#[from] ValenceExceeded),
}

impl Molecule {
    /// Parse, assign implicit hydrogens and perceive rings in one step.
    pub fn from_smiles(text: &str) -> Result<Molecule, ChemError> {
        let m = parse_smiles(text)?;
        let m = assign_implicit_hydrogens(m)?;
        Ok(perceive_rings(m))
    }
}
