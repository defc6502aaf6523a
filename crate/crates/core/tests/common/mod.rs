//! Fixtures and independent oracles shared by integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::path::PathBuf;

use affscreen::chem::{BondOrder, Molecule};
use affscreen::dataset::{pair_key, RawRecord};
use affscreen::fasta::ProteinSequence;
use affscreen::ligand::{ecfp, molecular_hash};
use affscreen::protein::{descriptor_for_residues, ResiduePropertyTable, STANDARD_RESIDUES};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn fixture_rows(name: &str) -> Vec<Vec<String>> {
    std::fs::read_to_string(fixture(name))
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split('\t').map(str::to_string).collect())
        .collect()
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub smiles: String,
    pub atoms: usize,
    pub bonds: usize,
}

pub fn smiles_corpus() -> Vec<CorpusEntry> {
    fixture_rows("smiles_corpus.tsv")
        .into_iter()
        .map(|f| CorpusEntry {
            name: f[0].clone(),
            smiles: f[1].clone(),
            atoms: f[2].parse().unwrap(),
            bonds: f[3].parse().unwrap(),
        })
        .collect()
}

pub fn fingerprint_subset() -> Vec<CorpusEntry> {
    let corpus = smiles_corpus();
    fixture_rows("fingerprint_subset.txt")
        .into_iter()
        .map(|f| corpus.iter().find(|e| e.name == f[0]).unwrap_or_else(|| panic!("{} not in corpus", f[0])).clone())
        .collect()
}

/// `(smiles, error variant, byte offset)`.
pub fn malformed_fixtures() -> Vec<(String, String, usize)> {
    fixture_rows("malformed_smiles.tsv")
        .into_iter()
        .map(|f| (f[0].clone(), f[1].clone(), f[2].parse().unwrap()))
        .collect()
}

/// Heavy-atom graph read straight off the SMILES tokens, without the library parser.
#[derive(Debug, Clone)]
pub struct Topology {
    pub atoms: usize,
    pub edges: Vec<(usize, usize)>,
}

pub fn oracle_topology(smiles: &str) -> Topology {
    let b = smiles.as_bytes();
    let mut atoms = 0;
    let mut edges = Vec::new();
    let mut prev: Option<usize> = None;
    let mut stack = Vec::new();
    let mut open: HashMap<u32, usize> = HashMap::new();
    let mut i = 0;
    while i < b.len() {
        let mut atom = |prev: &mut Option<usize>| {
            if let Some(p) = *prev {
                edges.push((p, atoms));
            }
            *prev = Some(atoms);
            atoms += 1;
        };
        let mut ring = |label: u32, prev: Option<usize>, edges: &mut Vec<(usize, usize)>| {
            let here = prev.expect("ring label after an atom");
            match open.remove(&label) {
                Some(other) => edges.push((other, here)),
                None => {
                    open.insert(label, here);
                }
            }
        };
        match b[i] {
            b'[' => {
                i += smiles[i..].find(']').unwrap();
                atom(&mut prev);
            }
            b'C' if b.get(i + 1) == Some(&b'l') => {
                i += 1;
                atom(&mut prev);
            }
            b'B' if b.get(i + 1) == Some(&b'r') => {
                i += 1;
                atom(&mut prev);
            }
            b'B' | b'C' | b'N' | b'O' | b'P' | b'S' | b'F' | b'I' | b'b' | b'c' | b'n' | b'o' | b'p' | b's' => {
                atom(&mut prev)
            }
            b'(' => stack.push(prev),
            b')' => prev = stack.pop().unwrap(),
            b'.' => prev = None,
            b'-' | b'=' | b'#' | b':' | b'/' | b'\\' => {}
            d @ b'0'..=b'9' => ring(u32::from(d - b'0'), prev, &mut edges),
            b'%' => {
                let label = smiles[i + 1..i + 3].parse().unwrap();
                ring(label, prev, &mut edges);
                i += 2;
            }
            other => panic!("oracle tokenizer: unexpected {:?}", other as char),
        }
        i += 1;
    }
    Topology { atoms, edges }
}

/// Number of distinct atom sets `{j : dist(i, j) <= r}` over all centres `i`
/// and radii `0..=radius`, by breadth-first search from every atom.
pub fn brute_force_environment_count(t: &Topology, radius: usize) -> usize {
    let mut adj = vec![Vec::new(); t.atoms];
    for &(a, b) in &t.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for start in 0..t.atoms {
        let mut dist = vec![usize::MAX; t.atoms];
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for r in 0..=radius {
            seen.insert((0..t.atoms).filter(|&j| dist[j] <= r).collect());
        }
    }
    seen.len()
}

fn atom_token(m: &Molecule, i: usize) -> String {
    let a = &m.atoms()[i];
    let mut s = String::from("[");
    if let Some(iso) = a.isotope {
        write!(s, "{iso}").unwrap();
    }
    if a.aromatic {
        s.push_str(&a.symbol().to_ascii_lowercase());
    } else {
        s.push_str(a.symbol());
    }
    match a.total_h() {
        0 => {}
        1 => s.push('H'),
        h => write!(s, "H{h}").unwrap(),
    }
    match a.formal_charge {
        0 => {}
        1 => s.push('+'),
        -1 => s.push('-'),
        q if q > 0 => write!(s, "+{q}").unwrap(),
        q => write!(s, "-{}", -q).unwrap(),
    }
    s.push(']');
    s
}

fn bond_symbol(order: BondOrder) -> char {
    match order {
        BondOrder::Single => '-',
        BondOrder::Double => '=',
        BondOrder::Triple => '#',
        BondOrder::Aromatic => ':',
    }
}

/// Writes `m` as SMILES from a random depth-first walk: random root per
/// component, random branch order, every atom bracketed and every bond explicit.
pub fn random_smiles(m: &Molecule, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = m.atom_count();
    let mut visited = vec![false; n];
    let mut handled = vec![false; m.bond_count()];
    let mut children: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut ring_bonds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut roots = Vec::new();

    fn walk(
        m: &Molecule,
        u: usize,
        rng: &mut ChaCha8Rng,
        visited: &mut [bool],
        handled: &mut [bool],
        children: &mut [Vec<(usize, usize)>],
        ring_bonds: &mut [Vec<usize>],
    ) {
        visited[u] = true;
        let mut nbrs = m.neighbors(u).to_vec();
        nbrs.shuffle(rng);
        for (v, b) in nbrs {
            if handled[b] {
                continue;
            }
            handled[b] = true;
            if visited[v] {
                ring_bonds[v].push(b);
                ring_bonds[u].push(b);
            } else {
                children[u].push((v, b));
                walk(m, v, rng, visited, handled, children, ring_bonds);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    for s in order {
        if !visited[s] {
            roots.push(s);
            walk(m, s, &mut rng, &mut visited, &mut handled, &mut children, &mut ring_bonds);
        }
    }

    struct Writer<'a> {
        m: &'a Molecule,
        children: &'a [Vec<(usize, usize)>],
        ring_bonds: &'a [Vec<usize>],
        labels: HashMap<usize, u32>,
        free: BTreeSet<u32>,
        out: String,
    }

    impl Writer<'_> {
        fn label(&mut self) -> u32 {
            let l = *self.free.iter().next().unwrap();
            self.free.remove(&l);
            l
        }

        fn emit_label(&mut self, l: u32) {
            if l < 10 {
                write!(self.out, "{l}").unwrap();
            } else {
                write!(self.out, "%{l:02}").unwrap();
            }
        }

        fn write(&mut self, u: usize) {
            self.out.push_str(&atom_token(self.m, u));
            for &b in &self.ring_bonds[u] {
                match self.labels.remove(&b) {
                    Some(l) => {
                        self.emit_label(l);
                        self.free.insert(l);
                    }
                    None => {
                        let l = self.label();
                        self.labels.insert(b, l);
                        self.out.push(bond_symbol(self.m.bonds()[b].order));
                        self.emit_label(l);
                    }
                }
            }
            let kids = &self.children[u];
            for (k, &(v, b)) in kids.iter().enumerate() {
                let last = k + 1 == kids.len();
                if !last {
                    self.out.push('(');
                }
                self.out.push(bond_symbol(self.m.bonds()[b].order));
                self.write(v);
                if !last {
                    self.out.push(')');
                }
            }
        }
    }

    let mut w = Writer {
        m,
        children: &children,
        ring_bonds: &ring_bonds,
        labels: HashMap::new(),
        free: (1..100).collect(),
        out: String::new(),
    };
    for (k, &r) in roots.iter().enumerate() {
        if k > 0 {
            w.out.push('.');
        }
        w.write(r);
    }
    w.out
}

/// Fragments that can be concatenated: each bonds to the previous piece at
/// its first atom and offers its last written atom to the next piece.
const LINKERS: &[&str] = &[
    "C", "CC", "O", "N", "C(=O)", "C(=O)N", "S(=O)(=O)", "C(F)(F)", "C(Cl)", "C(C)",
    "c1ccc(cc1)", "c1cccc(c1)", "c1ccccc1", "c1ccc(nc1)", "c1csc(c1)", "n1ccc(c1)",
    "C1CCN(CC1)", "N1CCN(CC1)", "C1CC(C1)", "c1ccc2ccccc2c1", "C(=O)O", "OC",
];
const CAPS: &[&str] = &["C", "O", "N", "F", "Cl", "Br", "C(=O)O", "C#N", "C(F)(F)F", "S(=O)(=O)N"];

pub fn fragment_ligand(rng: &mut ChaCha8Rng) -> String {
    let pieces = rng.random_range(2..=5);
    let mut s = String::new();
    for _ in 0..pieces {
        s.push_str(LINKERS[rng.random_range(0..LINKERS.len())]);
    }
    s.push_str(CAPS[rng.random_range(0..CAPS.len())]);
    s
}

pub fn random_protein(rng: &mut ChaCha8Rng, len: usize) -> String {
    let alphabet: Vec<char> = STANDARD_RESIDUES.chars().collect();
    (0..len).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect()
}

/// Generated screen with a known linear ground truth
/// `y = intercept + w_r . z(receptor descriptor) + w_b . fingerprint bits + N(0, noise)`.
pub struct SyntheticScreen {
    pub records: Vec<RawRecord>,
    pub noise_sd: f64,
}

pub fn synthetic_screen(seed: u64, n_pairs: usize, noise_sd: f64) -> SyntheticScreen {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = ResiduePropertyTable::builtin();

    let receptors: Vec<String> = (0..60)
        .map(|_| {
            let len = rng.random_range(80..300);
            random_protein(&mut rng, len)
        })
        .collect();
    let descs: Vec<Vec<f64>> = receptors.iter().map(|r| descriptor_for_residues(table, r).unwrap().values).collect();

    let mut ligands: Vec<(String, Molecule)> = Vec::new();
    let mut hashes = HashSet::new();
    while ligands.len() < 600 {
        let s = fragment_ligand(&mut rng);
        let m = Molecule::from_smiles(&s).unwrap_or_else(|e| panic!("generated {s}: {e}"));
        if hashes.insert(molecular_hash(&m).unwrap()) {
            ligands.push((s, m));
        }
    }
    let fps: Vec<_> = ligands.iter().map(|(_, m)| ecfp(m, 2, 2048).unwrap()).collect();

    // fingerprint bits present in 20-80% of the pool
    let mut frequent: Vec<u32> = (0..2048)
        .filter(|&b| {
            let f = fps.iter().filter(|fp| fp.get(b)).count() as f64 / fps.len() as f64;
            (0.2..=0.8).contains(&f)
        })
        .collect();
    frequent.shuffle(&mut rng);
    let bits: Vec<(u32, f64)> = frequent
        .iter()
        .take(6)
        .map(|&b| (b, rng.random_range(0.5..1.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 }))
        .collect();

    // standardized descriptor columns with spread across receptors
    let n_desc = descs[0].len();
    let stats: Vec<(f64, f64)> = (0..n_desc)
        .map(|c| {
            let mean = descs.iter().map(|d| d[c]).sum::<f64>() / descs.len() as f64;
            let var = descs.iter().map(|d| (d[c] - mean).powi(2)).sum::<f64>() / descs.len() as f64;
            (mean, var.sqrt())
        })
        .collect();
    let mut cols: Vec<usize> = (0..n_desc).filter(|&c| stats[c].1 > 1e-9).collect();
    cols.shuffle(&mut rng);
    let cols: Vec<(usize, f64)> = cols
        .iter()
        .take(6)
        .map(|&c| (c, rng.random_range(0.3..0.6) * if rng.random_bool(0.5) { 1.0 } else { -1.0 }))
        .collect();

    let noise = Normal::new(0.0, noise_sd).unwrap();
    let mut used = HashSet::new();
    let mut records = Vec::with_capacity(n_pairs);
    while records.len() < n_pairs {
        let (ri, li) = (rng.random_range(0..receptors.len()), rng.random_range(0..ligands.len()));
        if !used.insert((ri, li)) {
            continue;
        }
        let mut y = 6.0;
        for &(c, w) in &cols {
            y += w * (descs[ri][c] - stats[c].0) / stats[c].1;
        }
        for &(b, w) in &bits {
            if fps[li].get(b) {
                y += w;
            }
        }
        y += noise.sample(&mut rng);
        // keep labels inside the default Ki bounds so ingest keeps every pair
        if !(-2.5..=9.5).contains(&y) {
            used.remove(&(ri, li));
            continue;
        }
        records.push(RawRecord {
            line: records.len() + 2,
            receptor: receptors[ri].clone(),
            ligand: ligands[li].0.clone(),
            ki_nm: format!("{:e}", 10f64.powf(y)),
        });
    }
    SyntheticScreen { records, noise_sd }
}

/// Raw TSV text for a set of records.
pub fn raw_tsv(records: &[RawRecord]) -> String {
    let mut s = String::from("receptor_fasta\tligand_smiles\tki_nm\n");
    for r in records {
        writeln!(s, "{}\t{}\t{}", r.receptor, r.ligand, r.ki_nm).unwrap();
    }
    s
}

pub fn key_of(receptor: &str, smiles: &str) -> u64 {
    let p = ProteinSequence::new("r", receptor).unwrap();
    pair_key(&p, &Molecule::from_smiles(smiles).unwrap()).unwrap().0
}
