//! SMILES reader for the drug-like subset: organic-subset and bracket atoms,
//! branches, ring closures (`1`..`9`, `%nn`) and dot-separated components.
//! Stereo markers are accepted and dropped.

use std::collections::BTreeMap;

use thiserror::Error;

use super::molecule::{atomic_number, Atom, Bond, BondOrder, Molecule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmilesError {
    #[error("empty SMILES input")]
    EmptyInput,
    #[error("unknown symbol {symbol:?} at byte {offset}")]
    UnknownSymbol { offset: usize, symbol: char },
    #[error("ring closure {label} opened at byte {offset} is never closed")]
    UnclosedRing { offset: usize, label: u32 },
    #[error("unbalanced parenthesis at byte {offset}")]
    UnbalancedParen { offset: usize },
    #[error("duplicate bond at byte {offset}")]
    DuplicateBond { offset: usize },
    #[error("ring closure at byte {offset} bonds an atom to itself")]
    SelfBond { offset: usize },
    #[error("bond symbol at byte {offset} has no atom on one side")]
    DanglingBond { offset: usize },
    #[error("unexpected {token:?} at byte {offset}")]
    MisplacedToken { offset: usize, token: char },
    #[error("bad bracket atom at byte {offset}: {reason}")]
    BadBracket { offset: usize, reason: &'static str },
    #[error("ring closure at byte {offset} has conflicting bond symbols")]
    RingBondMismatch { offset: usize },
    #[error("hydrogen at byte {offset} cannot be folded into a heavy atom")]
    UnsupportedHydrogen { offset: usize },
}

impl SmilesError {
    pub fn offset(&self) -> usize {
        match *self {
            SmilesError::EmptyInput => 0,
            SmilesError::UnknownSymbol { offset, .. }
            | SmilesError::UnclosedRing { offset, .. }
            | SmilesError::UnbalancedParen { offset }
            | SmilesError::DuplicateBond { offset }
            | SmilesError::SelfBond { offset }
            | SmilesError::DanglingBond { offset }
            | SmilesError::MisplacedToken { offset, .. }
            | SmilesError::BadBracket { offset, .. }
            | SmilesError::RingBondMismatch { offset }
            | SmilesError::UnsupportedHydrogen { offset } => offset,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WrittenBond {
    Single,
    Double,
    Triple,
    Aromatic,
    /// `/` or `\`
    Directional,
}

impl WrittenBond {
    fn order(self) -> BondOrder {
        match self {
            WrittenBond::Single | WrittenBond::Directional => BondOrder::Single,
            WrittenBond::Double => BondOrder::Double,
            WrittenBond::Triple => BondOrder::Triple,
            WrittenBond::Aromatic => BondOrder::Aromatic,
        }
    }
}

struct OpenRing {
    atom: usize,
    bond: Option<WrittenBond>,
    offset: usize,
}

struct Parser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
    atoms: Vec<Atom>,
    offsets: Vec<usize>,
    bonds: Vec<Bond>,
    prev: Option<usize>,
    pending: Option<(WrittenBond, usize)>,
    branches: Vec<(usize, usize)>,
    rings: BTreeMap<u32, OpenRing>,
    stereo: usize,
    /// Last token opened a branch or component, so an atom must come next.
    expect_atom: bool,
}

/// Parses SMILES text into a heavy-atom graph. Implicit hydrogens and ring
/// membership are left unassigned.
pub fn parse_smiles(text: &str) -> Result<Molecule, SmilesError> {
    if text.is_empty() {
        return Err(SmilesError::EmptyInput);
    }
    let mut p = Parser {
        text,
        bytes: text.as_bytes(),
        pos: 0,
        atoms: Vec::new(),
        offsets: Vec::new(),
        bonds: Vec::new(),
        prev: None,
        pending: None,
        branches: Vec::new(),
        rings: BTreeMap::new(),
        stereo: 0,
        expect_atom: true,
    };
    p.run()?;
    let (atoms, bonds) = fold_hydrogens(p.atoms, p.bonds, &p.offsets)?;
    Ok(Molecule::new(atoms, bonds, text.to_string(), p.stereo))
}

impl<'a> Parser<'a> {
    fn run(&mut self) -> Result<(), SmilesError> {
        while self.pos < self.bytes.len() {
            let start = self.pos;
            let c = self.bytes[start];
            match c {
                b'[' => self.bracket_atom()?,
                b'B' | b'C' | b'N' | b'O' | b'P' | b'S' | b'F' | b'I' | b'b' | b'c' | b'n'
                | b'o' | b'p' | b's' => self.organic_atom()?,
                b'-' | b'=' | b'#' | b':' | b'/' | b'\\' => {
                    if self.prev.is_none() || self.pending.is_some() {
                        return Err(SmilesError::DanglingBond { offset: start });
                    }
                    let bond = match c {
                        b'-' => WrittenBond::Single,
                        b'=' => WrittenBond::Double,
                        b'#' => WrittenBond::Triple,
                        b':' => WrittenBond::Aromatic,
                        _ => {
                            self.stereo += 1;
                            WrittenBond::Directional
                        }
                    };
                    self.pending = Some((bond, start));
                    self.pos += 1;
                }
                b'0'..=b'9' | b'%' => self.ring_closure()?,
                b'(' => {
                    if let Some((_, offset)) = self.pending {
                        return Err(SmilesError::DanglingBond { offset });
                    }
                    let root = match self.prev {
                        Some(root) if self.pending.is_none() && !self.expect_atom => root,
                        _ => return Err(self.misplaced(start)),
                    };
                    self.branches.push((root, start));
                    self.expect_atom = true;
                    self.pos += 1;
                }
                b')' => {
                    if let Some((_, offset)) = self.pending {
                        return Err(SmilesError::DanglingBond { offset });
                    }
                    if self.expect_atom && !self.branches.is_empty() {
                        return Err(self.misplaced(start));
                    }
                    let (root, _) = self
                        .branches
                        .pop()
                        .ok_or(SmilesError::UnbalancedParen { offset: start })?;
                    self.prev = Some(root);
                    self.pos += 1;
                }
                b'.' => {
                    if let Some((_, offset)) = self.pending {
                        return Err(SmilesError::DanglingBond { offset });
                    }
                    if self.prev.is_none() || self.expect_atom {
                        return Err(self.misplaced(start));
                    }
                    self.prev = None;
                    self.expect_atom = true;
                    self.pos += 1;
                }
                _ => {
                    let symbol = self.text[start..].chars().next().unwrap_or('?');
                    return Err(SmilesError::UnknownSymbol { offset: start, symbol });
                }
            }
        }
        if let Some((_, offset)) = self.pending {
            return Err(SmilesError::DanglingBond { offset });
        }
        if let Some(&(_, offset)) = self.branches.last() {
            return Err(SmilesError::UnbalancedParen { offset });
        }
        if let Some((&label, ring)) = self.rings.iter().min_by_key(|(_, r)| r.offset) {
            return Err(SmilesError::UnclosedRing { offset: ring.offset, label });
        }
        if self.expect_atom {
            // Trailing '.'
            return Err(self.misplaced(self.bytes.len() - 1));
        }
        Ok(())
    }

    fn misplaced(&self, offset: usize) -> SmilesError {
        SmilesError::MisplacedToken {
            offset,
            token: self.text[offset..].chars().next().unwrap_or('?'),
        }
    }

    fn organic_atom(&mut self) -> Result<(), SmilesError> {
        let start = self.pos;
        let c = self.bytes[start];
        let next = self.bytes.get(start + 1).copied();
        let (element, aromatic, len) = match (c, next) {
            (b'C', Some(b'l')) => (17, false, 2),
            (b'B', Some(b'r')) => (35, false, 2),
            (b'B', _) => (5, false, 1),
            (b'C', _) => (6, false, 1),
            (b'N', _) => (7, false, 1),
            (b'O', _) => (8, false, 1),
            (b'P', _) => (15, false, 1),
            (b'S', _) => (16, false, 1),
            (b'F', _) => (9, false, 1),
            (b'I', _) => (53, false, 1),
            (b'b', _) => (5, true, 1),
            (b'c', _) => (6, true, 1),
            (b'n', _) => (7, true, 1),
            (b'o', _) => (8, true, 1),
            (b'p', _) => (15, true, 1),
            (b's', _) => (16, true, 1),
            _ => unreachable!("dispatched on organic-subset byte"),
        };
        self.pos += len;
        self.add_atom(Atom::organic(element, aromatic), start)
    }

    fn bracket_atom(&mut self) -> Result<(), SmilesError> {
        let start = self.pos;
        let close = match self.bytes[start..].iter().position(|&b| b == b']') {
            Some(rel) => start + rel,
            None => {
                return Err(SmilesError::BadBracket {
                    offset: start,
                    reason: "missing closing ']'",
                })
            }
        };
        let body = &self.text[start + 1..close];
        let bad = |reason| SmilesError::BadBracket { offset: start, reason };
        let b = body.as_bytes();
        let mut i = 0;

        let digits = b.iter().take_while(|c| c.is_ascii_digit()).count();
        let isotope = if digits > 0 {
            i = digits;
            Some(body[..digits].parse::<u16>().map_err(|_| bad("isotope out of range"))?)
        } else {
            None
        };

        let (element, aromatic) = {
            let rest = &body[i..];
            let two = rest.get(..2);
            if let Some(sym @ ("se" | "as")) = two {
                i += 2;
                (atomic_number(&capitalize(sym)).unwrap(), true)
            } else if let Some(sym) = two.filter(|s| {
                let sb = s.as_bytes();
                sb[0].is_ascii_uppercase() && sb[1].is_ascii_lowercase()
            }).filter(|s| atomic_number(s).is_some())
            {
                i += 2;
                (atomic_number(sym).unwrap(), false)
            } else {
                match rest.as_bytes().first() {
                    Some(&c @ (b'b' | b'c' | b'n' | b'o' | b'p' | b's')) => {
                        i += 1;
                        (atomic_number(&(c as char).to_ascii_uppercase().to_string()).unwrap(), true)
                    }
                    Some(c) if c.is_ascii_uppercase() => {
                        let sym = &rest[..1];
                        match atomic_number(sym) {
                            Some(z) => {
                                i += 1;
                                (z, false)
                            }
                            None => return Err(bad("unknown element symbol")),
                        }
                    }
                    _ => return Err(bad("missing element symbol")),
                }
            }
        };

        if b.get(i) == Some(&b'@') {
            i += 1;
            if b.get(i) == Some(&b'@') {
                i += 1;
            }
            self.stereo += 1;
        }

        let mut explicit_h = 0u8;
        if b.get(i) == Some(&b'H') {
            i += 1;
            let n = b[i..].iter().take_while(|c| c.is_ascii_digit()).count();
            explicit_h = if n == 0 {
                1
            } else {
                let v = body[i..i + n].parse::<u8>().map_err(|_| bad("hydrogen count out of range"))?;
                i += n;
                v
            };
        }

        let mut charge = 0i32;
        if let Some(&sign @ (b'+' | b'-')) = b.get(i) {
            let unit = if sign == b'+' { 1 } else { -1 };
            i += 1;
            let n = b[i..].iter().take_while(|c| c.is_ascii_digit()).count();
            if n > 0 {
                let v: i32 = body[i..i + n].parse().map_err(|_| bad("charge out of range"))?;
                charge = unit * v;
                i += n;
            } else {
                charge = unit;
                while b.get(i) == Some(&sign) {
                    charge += unit;
                    i += 1;
                }
            }
            if charge.abs() > 15 {
                return Err(bad("charge out of range"));
            }
        }

        if b.get(i) == Some(&b':') {
            i += 1;
            let n = b[i..].iter().take_while(|c| c.is_ascii_digit()).count();
            if n == 0 {
                return Err(bad("atom class needs digits"));
            }
            i += n;
        }

        if i != b.len() {
            return Err(bad("unexpected characters"));
        }

        self.pos = close + 1;
        let atom = Atom {
            element,
            formal_charge: charge as i8,
            isotope,
            aromatic,
            explicit_h,
            implicit_h: 0,
            in_ring: false,
            bracket: true,
        };
        self.add_atom(atom, start)
    }

    fn add_atom(&mut self, atom: Atom, offset: usize) -> Result<(), SmilesError> {
        let idx = self.atoms.len();
        let aromatic = atom.aromatic;
        self.atoms.push(atom);
        self.offsets.push(offset);
        if let Some(prev) = self.prev {
            let order = match self.pending.take() {
                Some((b, _)) => b.order(),
                None => self.implicit_order(prev, aromatic),
            };
            // A fresh atom cannot already be bonded to prev.
            self.bonds.push(Bond { a: prev, b: idx, order, in_ring: false });
        }
        self.prev = Some(idx);
        self.expect_atom = false;
        Ok(())
    }

    fn implicit_order(&self, other: usize, this_aromatic: bool) -> BondOrder {
        if this_aromatic && self.atoms[other].aromatic {
            BondOrder::Aromatic
        } else {
            BondOrder::Single
        }
    }

    fn ring_closure(&mut self) -> Result<(), SmilesError> {
        let start = self.pos;
        let label = if self.bytes[start] == b'%' {
            let digits = self.bytes.get(start + 1..start + 3);
            match digits {
                Some(d) if d.iter().all(u8::is_ascii_digit) => {
                    self.pos += 3;
                    u32::from(d[0] - b'0') * 10 + u32::from(d[1] - b'0')
                }
                _ => return Err(self.misplaced(start)),
            }
        } else {
            self.pos += 1;
            u32::from(self.bytes[start] - b'0')
        };
        let atom = match self.prev {
            Some(a) if !self.expect_atom => a,
            _ => return Err(self.misplaced(start)),
        };
        let written = self.pending.take().map(|(b, _)| b);

        match self.rings.remove(&label) {
            None => {
                self.rings.insert(label, OpenRing { atom, bond: written, offset: start });
            }
            Some(open) => {
                if open.atom == atom {
                    return Err(SmilesError::SelfBond { offset: start });
                }
                let order = match (open.bond, written) {
                    (Some(a), Some(b)) if a.order() != b.order() => {
                        return Err(SmilesError::RingBondMismatch { offset: start })
                    }
                    (Some(a), _) => a.order(),
                    (None, Some(b)) => b.order(),
                    (None, None) => self.implicit_order(open.atom, self.atoms[atom].aromatic),
                };
                let exists = self.bonds.iter().any(|b| {
                    (b.a == open.atom && b.b == atom) || (b.a == atom && b.b == open.atom)
                });
                if exists {
                    return Err(SmilesError::DuplicateBond { offset: start });
                }
                self.bonds.push(Bond { a: open.atom, b: atom, order, in_ring: false });
            }
        }
        Ok(())
    }
}

fn capitalize(s: &str) -> String {
    let mut out = s[..1].to_ascii_uppercase();
    out.push_str(&s[1..]);
    out
}

/// Removes `[H]` atoms, crediting each to its single heavy neighbour.
fn fold_hydrogens(
    mut atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    offsets: &[usize],
) -> Result<(Vec<Atom>, Vec<Bond>), SmilesError> {
    if atoms.iter().all(|a| a.element != 1) {
        return Ok((atoms, bonds));
    }
    for (i, atom) in atoms.iter().enumerate() {
        if atom.element != 1 {
            continue;
        }
        let incident: Vec<&Bond> = bonds.iter().filter(|b| b.a == i || b.b == i).collect();
        let foldable = atom.formal_charge == 0
            && atom.explicit_h == 0
            && incident.len() == 1
            && incident[0].order == BondOrder::Single
            && atoms[incident[0].other(i)].element != 1;
        if !foldable {
            return Err(SmilesError::UnsupportedHydrogen { offset: offsets[i] });
        }
    }
    let mut remap = vec![usize::MAX; atoms.len()];
    let mut kept_bonds = Vec::with_capacity(bonds.len());
    for bond in &bonds {
        if atoms[bond.a].element == 1 {
            atoms[bond.b].explicit_h += 1;
        } else if atoms[bond.b].element == 1 {
            atoms[bond.a].explicit_h += 1;
        }
    }
    let mut next = 0;
    for (i, atom) in atoms.iter().enumerate() {
        if atom.element != 1 {
            remap[i] = next;
            next += 1;
        }
    }
    for bond in bonds {
        if remap[bond.a] != usize::MAX && remap[bond.b] != usize::MAX {
            kept_bonds.push(Bond { a: remap[bond.a], b: remap[bond.b], ..bond });
        }
    }
    atoms.retain(|a| a.element != 1);
    Ok((atoms, kept_bonds))
}
