use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Dataset, DatasetError, Split};

/// Name of the generator recorded in provenance.
pub const SPLIT_PRNG: &str = "ChaCha8Rng::seed_from_u64 + Fisher-Yates (multiply-shift index)";

pub type Ratios = [f64; 3];

fn validate(ratios: &Ratios) -> Result<(), DatasetError> {
    if ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(DatasetError::BadRatios(format!("ratios must be positive, got {ratios:?}")));
    }
    let sum: f64 = ratios.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(DatasetError::BadRatios(format!("ratios must sum to 1, got {sum}")));
    }
    Ok(())
}

/// Largest-remainder apportionment of `n` records; ties in the remainder go
/// to the earlier subset.
pub fn split_counts(n: usize, ratios: &Ratios) -> Result<[usize; 3], DatasetError> {
    validate(ratios)?;
    let mut counts = [0usize; 3];
    let mut remainders = [0.0f64; 3];
    for i in 0..3 {
        let exact = n as f64 * ratios[i];
        // absorb representation error such as 1000 * 0.7 = 699.9999999999999
        let exact = if (exact - exact.round()).abs() < 1e-6 { exact.round() } else { exact };
        counts[i] = exact.floor() as usize;
        remainders[i] = exact - exact.floor();
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| remainders[b].total_cmp(&remainders[a]).then(a.cmp(&b)));
    let assigned: usize = counts.iter().sum();
    for &i in order.iter().take(n.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    Ok(counts)
}

/// Uniform index in `0..bound` from the high half of a 64x64 product.
fn bounded(rng: &mut ChaCha8Rng, bound: usize) -> usize {
    ((rng.next_u64() as u128 * bound as u128) >> 64) as usize
}

/// Seeded shuffle of record positions; the first `counts[0]` go to train,
/// the next `counts[1]` to valid, the rest to test. Record order is unchanged.
pub fn split(mut d: Dataset, seed: u64, ratios: Ratios) -> Result<Dataset, DatasetError> {
    let n = d.records.len();
    if n < 3 {
        return Err(DatasetError::TooFewRecords(n));
    }
    let counts = split_counts(n, &ratios)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = bounded(&mut rng, i + 1);
        order.swap(i, j);
    }
    for (pos, &idx) in order.iter().enumerate() {
        d.records[idx].split = if pos < counts[0] {
            Split::Train
        } else if pos < counts[0] + counts[1] {
            Split::Valid
        } else {
            Split::Test
        };
    }
    let p = &mut d.provenance;
    p.seed = Some(seed);
    p.ratios = Some(ratios);
    p.split_counts = Some(counts);
    p.split_prng = Some(SPLIT_PRNG.to_string());
    Ok(d)
}
