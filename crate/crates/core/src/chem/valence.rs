//! Implicit hydrogen assignment.
//!
//! Organic-subset atoms get `implicit_h = v - s`, where `s` is the sum of bond
//! valence units (single/aromatic 1, double 2, triple 3) plus folded explicit
//! hydrogens and `v` is the smallest allowed valence `>= s`. Aromatic atoms
//! additionally reserve one unit for the pi system when `v - s >= 1`, which
//! gives benzene `c` one H, fused `c` none, and leaves lone-pair donors like
//! furan `o` or thiophene `s` at zero.
//!
//! Bracket atoms keep their written H count. They are only checked against the
//! table maximum widened by `|charge|`, so `[NH4+]` and `[OH3+]` pass.

use thiserror::Error;

use super::molecule::{valence_table, Molecule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("atom {atom} ({symbol}) has valence {used}, above the allowed maximum {max}")]
pub struct ValenceExceeded {
    pub atom: usize,
    pub symbol: &'static str,
    pub used: u32,
    pub max: u32,
}

pub fn assign_implicit_hydrogens(mut m: Molecule) -> Result<Molecule, ValenceExceeded> {
    let sums: Vec<u32> = (0..m.atoms.len())
        .map(|i| {
            m.adjacency[i]
                .iter()
                .map(|&(_, b)| m.bonds[b].order.valence_units())
                .sum::<u32>()
        })
        .collect();

    for (i, atom) in m.atoms.iter_mut().enumerate() {
        let Some(table) = valence_table(atom.element) else {
            atom.implicit_h = 0;
            continue;
        };
        let max = u32::from(*table.last().unwrap());
        let used = sums[i] + u32::from(atom.explicit_h);
        if atom.bracket {
            let widened = max + u32::from(atom.formal_charge.unsigned_abs());
            if used > widened {
                return Err(ValenceExceeded { atom: i, symbol: atom.symbol(), used, max: widened });
            }
            atom.implicit_h = 0;
            continue;
        }
        let Some(target) = table.iter().map(|&v| u32::from(v)).find(|&v| v >= used) else {
            return Err(ValenceExceeded { atom: i, symbol: atom.symbol(), used, max });
        };
        let mut free = target - used;
        if atom.aromatic && free >= 1 {
            free -= 1;
        }
        atom.implicit_h = free as u8;
    }
    m.hydrogens_assigned = true;
    Ok(m)
}
