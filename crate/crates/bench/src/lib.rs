//! Benchmarks live in `benches/`; run them with `cargo bench -p affscreen-bench`.

/// Drug-like SMILES used as parser and fingerprint inputs.
pub const LIGANDS: [&str; 8] = [
    "CC(=O)Oc1ccccc1C(=O)O",
    "CN1C=NC2=C1C(=O)N(C(=O)N2C)C",
    "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
    "COc1ccc2[nH]cc(CCN(C)C)c2c1",
    "O=C(N[C@@H](Cc1ccccc1)C(=O)O)c1ccccn1",
    "Cc1ccc(cc1Nc1nccc(n1)c1cccnc1)NC(=O)c1ccc(cc1)CN1CCN(C)CC1",
    "CC(C)NCC(O)COc1cccc2ccccc12",
    "C1CCC(CC1)N2C(=O)C3=CC=CC=C3C2=O",
];
