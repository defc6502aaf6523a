//! Extended-connectivity (Morgan) fingerprints.
//!
//! Atom identifiers start as a 32-bit FNV-1a hash of six little-endian `i32`
//! fields: atomic number, heavy degree, total H, formal charge, in-ring flag,
//! aromatic flag. Each iteration re-hashes `[own id, (bond code, neighbor id)...]`
//! with the neighbor pairs sorted. An environment is the ball of atoms within
//! `r` bonds of its center; environments whose atom set was already emitted at
//! an equal or smaller radius are dropped. Bits are `identifier % nbits`.

use std::collections::HashSet;

use crate::chem::Molecule;
use crate::hash::{Fnv1a32, Fnv1a64};

use super::FeatureError;

pub const DEFAULT_RADIUS: u32 = 2;
pub const DEFAULT_NBITS: u32 = 2048;

/// A circular substructure that survived duplicate removal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircularEnvironment {
    pub identifier: u32,
    pub radius: u32,
    pub center: usize,
    /// Sorted atom indices within `radius` bonds of `center`.
    pub atoms: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    words: Vec<u64>,
    nbits: u32,
    radius: u32,
}

impl Fingerprint {
    pub fn empty(nbits: u32, radius: u32) -> Self {
        Fingerprint { words: vec![0; (nbits as usize).div_ceil(64)], nbits, radius }
    }

    pub fn nbits(&self) -> u32 {
        self.nbits
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn set(&mut self, bit: u32) {
        assert!(bit < self.nbits, "bit {bit} out of range for {} bits", self.nbits);
        self.words[(bit / 64) as usize] |= 1 << (bit % 64);
    }

    pub fn get(&self, bit: u32) -> bool {
        bit < self.nbits && self.words[(bit / 64) as usize] >> (bit % 64) & 1 == 1
    }

    pub fn popcount(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Indices of set bits in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.nbits).filter(move |&b| self.get(b))
    }

    pub fn tanimoto(&self, other: &Fingerprint) -> f64 {
        let (mut both, mut any) = (0u32, 0u32);
        for (a, b) in self.words.iter().zip(&other.words) {
            both += (a & b).count_ones();
            any += (a | b).count_ones();
        }
        if any == 0 {
            1.0
        } else {
            f64::from(both) / f64::from(any)
        }
    }
}

pub fn atom_invariant(m: &Molecule, atom: usize) -> u32 {
    let a = &m.atoms()[atom];
    let mut h = Fnv1a32::default();
    h.write_i32(i32::from(a.element));
    h.write_i32(m.degree(atom) as i32);
    h.write_i32(i32::from(a.total_h()));
    h.write_i32(i32::from(a.formal_charge));
    h.write_i32(i32::from(a.in_ring));
    h.write_i32(i32::from(a.aromatic));
    h.finish()
}

fn refine(m: &Molecule, ids: &[u32]) -> Vec<u32> {
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    (0..m.atom_count())
        .map(|i| {
            pairs.clear();
            pairs.extend(
                m.neighbors(i)
                    .iter()
                    .map(|&(n, b)| (m.bonds()[b].order.code(), ids[n])),
            );
            pairs.sort_unstable();
            let mut h = Fnv1a32::default();
            h.write_u32(ids[i]);
            for &(code, id) in &pairs {
                h.write_u32(code);
                h.write_u32(id);
            }
            h.finish()
        })
        .collect()
}

fn check_annotated(m: &Molecule) -> Result<(), FeatureError> {
    if m.is_annotated() {
        Ok(())
    } else {
        Err(FeatureError::NotAnnotated)
    }
}

/// All environments kept after duplicate removal, ordered by radius then identifier.
pub fn circular_environments(m: &Molecule, radius: u32) -> Result<Vec<CircularEnvironment>, FeatureError> {
    check_annotated(m)?;
    let n = m.atom_count();
    let words = n.div_ceil(64).max(1);
    let mut ids: Vec<u32> = (0..n).map(|i| atom_invariant(m, i)).collect();
    let mut balls: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let mut set = vec![0u64; words];
            set[i / 64] |= 1 << (i % 64);
            set
        })
        .collect();
    let mut emitted: HashSet<Vec<u64>> = HashSet::new();
    let mut out = Vec::new();

    for r in 0..=radius {
        if r > 0 {
            ids = refine(m, &ids);
            balls = (0..n)
                .map(|i| {
                    let mut set = balls[i].clone();
                    for &(nb, _) in m.neighbors(i) {
                        for (w, src) in set.iter_mut().zip(&balls[nb]) {
                            *w |= src;
                        }
                    }
                    set
                })
                .collect();
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| (ids[a], &balls[a]).cmp(&(ids[b], &balls[b])));
        for i in order {
            if emitted.insert(balls[i].clone()) {
                let atoms = (0..n).filter(|&a| balls[i][a / 64] >> (a % 64) & 1 == 1).collect();
                out.push(CircularEnvironment { identifier: ids[i], radius: r, center: i, atoms });
            }
        }
    }
    Ok(out)
}

pub fn ecfp(m: &Molecule, radius: u32, nbits: u32) -> Result<Fingerprint, FeatureError> {
    if nbits == 0 || !nbits.is_power_of_two() {
        return Err(FeatureError::InvalidNbits(nbits));
    }
    let mut fp = Fingerprint::empty(nbits, radius);
    for env in circular_environments(m, radius)? {
        fp.set(env.identifier % nbits);
    }
    Ok(fp)
}

/// Order-independent graph hash: the sorted multiset of Morgan identifiers
/// after refinement stops splitting atom classes, folded with 64-bit FNV-1a.
pub fn molecular_hash(m: &Molecule) -> Result<u64, FeatureError> {
    check_annotated(m)?;
    let n = m.atom_count();
    let mut ids: Vec<u32> = (0..n).map(|i| atom_invariant(m, i)).collect();
    let classes = |ids: &[u32]| ids.iter().collect::<HashSet<_>>().len();
    let mut current = classes(&ids);
    for _ in 0..n {
        let next = refine(m, &ids);
        let count = classes(&next);
        ids = next;
        if count == current {
            break;
        }
        current = count;
    }
    ids.sort_unstable();
    let mut h = Fnv1a64::default();
    h.write(&(n as u64).to_le_bytes());
    for id in ids {
        h.write(&id.to_le_bytes());
    }
    Ok(h.finish())
}
