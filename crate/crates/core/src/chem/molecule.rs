use std::fmt;

/// Bond multiplicity as written in SMILES.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Stable integer code used when hashing atom environments.
    pub fn code(self) -> u32 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        }
    }

    /// Contribution to an atom's valence sum. Aromatic bonds count as one here;
    /// the extra pi electron is accounted for per atom (see `chem::valence`).
    pub fn valence_units(self) -> u32 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    /// Atomic number.
    pub element: u8,
    pub formal_charge: i8,
    pub isotope: Option<u16>,
    pub aromatic: bool,
    /// Hydrogens written explicitly, either inside brackets (`[NH4+]`) or as
    /// folded `[H]` neighbours.
    pub explicit_h: u8,
    pub implicit_h: u8,
    pub in_ring: bool,
    /// Written in bracket form; the bracket's H count is authoritative.
    pub bracket: bool,
}

impl Atom {
    pub fn organic(element: u8, aromatic: bool) -> Self {
        Atom {
            element,
            formal_charge: 0,
            isotope: None,
            aromatic,
            explicit_h: 0,
            implicit_h: 0,
            in_ring: false,
            bracket: false,
        }
    }

    pub fn total_h(&self) -> u8 {
        self.explicit_h + self.implicit_h
    }

    pub fn symbol(&self) -> &'static str {
        element_symbol(self.element).unwrap_or("?")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
    pub in_ring: bool,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if self.a == atom {
            self.b
        } else {
            self.a
        }
    }
}

/// Heavy-atom molecular graph parsed from SMILES.
///
/// Values are built by [`crate::chem::parse_smiles`] and annotated in place by
/// [`crate::chem::assign_implicit_hydrogens`] and [`crate::chem::perceive_rings`];
/// after that they are never mutated and can be shared freely across threads.
#[derive(Debug, Clone)]
pub struct Molecule {
    pub(crate) atoms: Vec<Atom>,
    pub(crate) bonds: Vec<Bond>,
    pub(crate) adjacency: Vec<Vec<(usize, usize)>>,
    pub(crate) source: String,
    pub(crate) rings: Vec<Vec<usize>>,
    pub(crate) stereo_markers: usize,
    pub(crate) hydrogens_assigned: bool,
    pub(crate) rings_perceived: bool,
}

impl Molecule {
    pub(crate) fn new(atoms: Vec<Atom>, bonds: Vec<Bond>, source: String, stereo_markers: usize) -> Self {
        let mut adjacency = vec![Vec::new(); atoms.len()];
        for (i, bond) in bonds.iter().enumerate() {
            adjacency[bond.a].push((bond.b, i));
            adjacency[bond.b].push((bond.a, i));
        }
        Molecule {
            atoms,
            bonds,
            adjacency,
            source,
            rings: Vec::new(),
            stereo_markers,
            hydrogens_assigned: false,
            rings_perceived: false,
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    /// The SMILES text this molecule was parsed from.
    pub fn source(&self) -> &str {
        &self.source
    }

    /// `(neighbor, bond index)` pairs of an atom.
    pub fn neighbors(&self, atom: usize) -> &[(usize, usize)] {
        &self.adjacency[atom]
    }

    /// Number of heavy-atom neighbours.
    pub fn degree(&self, atom: usize) -> usize {
        self.adjacency[atom].len()
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<&Bond> {
        self.adjacency[a]
            .iter()
            .find(|&&(n, _)| n == b)
            .map(|&(_, bi)| &self.bonds[bi])
    }

    /// Minimum cycle basis; empty until rings are perceived.
    pub fn rings(&self) -> &[Vec<usize>] {
        &self.rings
    }

    /// Count of stereo markers (`/`, `\`, `@`, `@@`) that were accepted and dropped.
    pub fn stereo_markers(&self) -> usize {
        self.stereo_markers
    }

    pub fn hydrogens_assigned(&self) -> bool {
        self.hydrogens_assigned
    }

    pub fn rings_perceived(&self) -> bool {
        self.rings_perceived
    }

    pub fn is_annotated(&self) -> bool {
        self.hydrogens_assigned && self.rings_perceived
    }

    /// Connected components as sorted atom index lists, ordered by lowest atom.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.atoms.len()];
        let mut out = Vec::new();
        for start in 0..self.atoms.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut members = Vec::new();
            while let Some(a) = stack.pop() {
                members.push(a);
                for &(n, _) in &self.adjacency[a] {
                    if !seen[n] {
                        seen[n] = true;
                        stack.push(n);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }
}

impl fmt::Display for Molecule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

const ELEMENTS: [&str; 86] = [
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl",
    "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As",
    "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In",
    "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb",
    "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl",
    "Pb", "Bi", "Po", "At", "Rn",
];

pub fn element_symbol(atomic_number: u8) -> Option<&'static str> {
    ELEMENTS.get(usize::from(atomic_number).checked_sub(1)?).copied()
}

pub fn atomic_number(symbol: &str) -> Option<u8> {
    ELEMENTS
        .iter()
        .position(|&s| s == symbol)
        .map(|i| (i + 1) as u8)
}

/// Allowed valences for elements with a defined default valence.
pub fn valence_table(atomic_number: u8) -> Option<&'static [u8]> {
    match atomic_number {
        5 => Some(&[3]),
        6 => Some(&[4]),
        7 | 15 => Some(&[3, 5]),
        8 => Some(&[2]),
        16 => Some(&[2, 4, 6]),
        9 | 17 | 35 | 53 => Some(&[1]),
        _ => None,
    }
}
