//! Ring perception via Horton's minimum cycle basis.

use std::collections::{HashSet, VecDeque};

use super::molecule::{BondOrder, Molecule};

type EdgeSet = Vec<u64>;

/// Sets `in_ring` on atoms and bonds and stores the minimum cycle basis.
///
/// Aromatic bonds that end up outside every ring (the implicit bond in
/// `c1ccccc1c1ccccc1`) are demoted to single bonds.
pub fn perceive_rings(mut m: Molecule) -> Molecule {
    let basis = minimum_cycle_basis(&m);
    for atom in &mut m.atoms {
        atom.in_ring = false;
    }
    for bond in &mut m.bonds {
        bond.in_ring = false;
    }
    let mut rings = Vec::with_capacity(basis.len());
    for cycle in &basis {
        for (bi, bond) in m.bonds.iter_mut().enumerate() {
            if bit(cycle, bi) {
                bond.in_ring = true;
            }
        }
        rings.push(cycle_atoms(&m, cycle));
    }
    for bi in 0..m.bonds.len() {
        let (a, b) = (m.bonds[bi].a, m.bonds[bi].b);
        if m.bonds[bi].in_ring {
            m.atoms[a].in_ring = true;
            m.atoms[b].in_ring = true;
        } else if m.bonds[bi].order == BondOrder::Aromatic {
            m.bonds[bi].order = BondOrder::Single;
        }
    }
    m.rings = rings;
    m.rings_perceived = true;
    m
}

fn bit(set: &EdgeSet, i: usize) -> bool {
    set[i / 64] >> (i % 64) & 1 == 1
}

fn set_bit(set: &mut EdgeSet, i: usize) {
    set[i / 64] |= 1 << (i % 64);
}

fn xor_into(dst: &mut EdgeSet, src: &EdgeSet) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn first_bit(set: &EdgeSet) -> Option<usize> {
    set.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

fn minimum_cycle_basis(m: &Molecule) -> Vec<EdgeSet> {
    let n = m.atom_count();
    let e = m.bond_count();
    let rank = (e + m.components().len()).saturating_sub(n);
    if rank == 0 {
        return Vec::new();
    }
    let words = e.div_ceil(64);

    let mut candidates: Vec<(usize, EdgeSet)> = Vec::new();
    let mut seen: HashSet<EdgeSet> = HashSet::new();
    for root in 0..n {
        // BFS tree: parent atom and parent bond per reached atom
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![(usize::MAX, usize::MAX); n];
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(a) = queue.pop_front() {
            for &(nb, bi) in m.neighbors(a) {
                if dist[nb] == usize::MAX {
                    dist[nb] = dist[a] + 1;
                    parent[nb] = (a, bi);
                    queue.push_back(nb);
                }
            }
        }
        let path = |mut a: usize| {
            let mut atoms = vec![a];
            let mut bonds = Vec::new();
            while a != root {
                let (p, bi) = parent[a];
                bonds.push(bi);
                atoms.push(p);
                a = p;
            }
            (atoms, bonds)
        };
        for (bi, bond) in m.bonds().iter().enumerate() {
            let (x, y) = (bond.a, bond.b);
            if dist[x] == usize::MAX || parent[x].1 == bi || parent[y].1 == bi {
                continue;
            }
            let (px, bx) = path(x);
            let (py, by) = path(y);
            // Paths may only share the root.
            let shared = px.iter().filter(|a| py.contains(a)).count();
            if shared != 1 {
                continue;
            }
            let mut set = vec![0u64; words];
            for &b in bx.iter().chain(&by) {
                set_bit(&mut set, b);
            }
            set_bit(&mut set, bi);
            if seen.insert(set.clone()) {
                candidates.push((dist[x] + dist[y] + 1, set));
            }
        }
    }
    candidates.sort();

    // Greedy GF(2) independence test; `reduced` is kept in echelon form keyed by pivot.
    let mut reduced: Vec<(usize, EdgeSet)> = Vec::new();
    let mut basis = Vec::with_capacity(rank);
    for (_, cycle) in candidates {
        let mut v = cycle.clone();
        for (pivot, row) in &reduced {
            if bit(&v, *pivot) {
                xor_into(&mut v, row);
            }
        }
        if let Some(pivot) = first_bit(&v) {
            for (_, row) in reduced.iter_mut() {
                if bit(row, pivot) {
                    xor_into(row, &v);
                }
            }
            reduced.push((pivot, v));
            basis.push(cycle);
            if basis.len() == rank {
                break;
            }
        }
    }
    basis
}

/// Walks a simple cycle given as a bond set, starting at its lowest atom.
fn cycle_atoms(m: &Molecule, cycle: &EdgeSet) -> Vec<usize> {
    let bonds: Vec<usize> = (0..m.bond_count()).filter(|&b| bit(cycle, b)).collect();
    let start = bonds
        .iter()
        .flat_map(|&b| [m.bonds[b].a, m.bonds[b].b])
        .min()
        .expect("cycle has bonds");
    let mut out = vec![start];
    let mut prev_bond = usize::MAX;
    let mut current = start;
    loop {
        let &(next, bi) = m
            .neighbors(current)
            .iter()
            .filter(|&&(_, bi)| bi != prev_bond && bit(cycle, bi))
            .min()
            .expect("cycle is closed");
        if next == start {
            break;
        }
        out.push(next);
        prev_bond = bi;
        current = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::parse_smiles;

    fn rings(smiles: &str) -> Molecule {
        perceive_rings(parse_smiles(smiles).unwrap())
    }

    #[test]
    fn acyclic() {
        let m = rings("CCO");
        assert!(m.rings().is_empty());
        assert!(m.atoms().iter().all(|a| !a.in_ring));
        assert!(m.bonds().iter().all(|b| !b.in_ring));
    }

    #[test]
    fn benzene_single_ring() {
        let m = rings("c1ccccc1");
        assert_eq!(m.rings().len(), 1);
        assert_eq!(m.rings()[0].len(), 6);
        assert!(m.atoms().iter().all(|a| a.in_ring));
        assert!(m.bonds().iter().all(|b| b.in_ring));
    }

    #[test]
    fn naphthalene_two_six_rings() {
        let m = rings("c1ccc2ccccc2c1");
        let mut sizes: Vec<usize> = m.rings().iter().map(Vec::len).collect();
        sizes.sort();
        assert_eq!(sizes, vec![6, 6]);
        // fusion atoms are 3 and 8
        let shared: Vec<usize> = (0..10)
            .filter(|a| m.rings().iter().all(|r| r.contains(a)))
            .collect();
        assert_eq!(shared, vec![3, 8]);
    }

    #[test]
    fn substituent_not_in_ring() {
        let m = rings("CC1CC1");
        let flags: Vec<bool> = m.atoms().iter().map(|a| a.in_ring).collect();
        assert_eq!(flags, vec![false, true, true, true]);
        assert!(!m.bonds()[0].in_ring);
    }

    #[test]
    fn cubane_basis_has_five_four_rings() {
        let m = rings("C12C3C4C1C5C2C3C45");
        assert_eq!(m.rings().len(), 5);
        assert!(m.rings().iter().all(|r| r.len() == 4));
    }

    #[test]
    fn spiro_and_disconnected() {
        let m = rings("C1CCC11CCCC1.C1CC1");
        let mut sizes: Vec<usize> = m.rings().iter().map(Vec::len).collect();
        sizes.sort();
        assert_eq!(sizes, vec![3, 4, 5]);
    }

    #[test]
    fn inter_ring_aromatic_bond_demoted() {
        let m = rings("c1ccccc1c1ccccc1");
        let bridge = m.bonds().iter().find(|b| !b.in_ring).unwrap();
        assert_eq!(bridge.order, BondOrder::Single);
        assert_eq!(m.bonds().iter().filter(|b| b.order == BondOrder::Aromatic).count(), 12);
    }
}
