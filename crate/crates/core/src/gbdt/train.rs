//! Least-squares gradient boosting.
//!
//! Trees are grown level by level. For the histogram splitter each level is one
//! pass over the sparse non-default bin entries of every feature; the default
//! bin of each node is recovered by subtracting from the node totals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::binning::{midpoint, BinnedMatrix};
use super::model::{Child, GbdtModel, SplitNode, Tree};
use super::{GbdtError, Matrix, Splitter, TrainParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationMetrics {
    pub iteration: usize,
    pub train_mse: f64,
    pub valid_mae: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Train MSE of the base prediction alone.
    pub initial_train_mse: f64,
    pub iterations: Vec<IterationMetrics>,
    /// All targets were equal; the model is the constant base prediction.
    pub degenerate: bool,
    /// Number of trees kept (after early-stopping truncation).
    pub trees_kept: usize,
    pub stopped_early: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    feature: usize,
    threshold: f64,
    gain: f64,
}

struct OpenNode {
    rows: Vec<u32>,
    sum: f64,
    sum_sq: f64,
    depth: usize,
    /// Where the parent stores the reference to this node.
    slot: ParentSlot,
}

#[derive(Clone, Copy)]
enum ParentSlot {
    Root,
    Left(usize),
    Right(usize),
}

fn split_gain(sum_l: f64, n_l: usize, sum_r: f64, n_r: usize, sum: f64, n: usize) -> f64 {
    sum_l * sum_l / n_l as f64 + sum_r * sum_r / n_r as f64 - sum * sum / n as f64
}

/// Splits below this fraction of the node's residual sum of squares are noise.
const MIN_RELATIVE_GAIN: f64 = 1e-10;

trait SplitFinder: Sync {
    /// Best split per open node, or `None` when no admissible split helps.
    fn find(&self, nodes: &[OpenNode], residuals: &[f64], row_slot: &[u32]) -> Vec<Option<Candidate>>;
}

struct HistogramFinder<'a> {
    binned: &'a BinnedMatrix,
    min_leaf: usize,
}

impl SplitFinder for HistogramFinder<'_> {
    fn find(&self, nodes: &[OpenNode], residuals: &[f64], row_slot: &[u32]) -> Vec<Option<Candidate>> {
        let per_feature: Vec<Vec<Option<(f64, usize)>>> = self
            .binned
            .features
            .par_iter()
            .map(|feat| {
                let nb = feat.n_bins();
                if nb < 2 {
                    return vec![None; nodes.len()];
                }
                let mut sums = vec![0.0f64; nodes.len() * nb];
                let mut counts = vec![0usize; nodes.len() * nb];
                for &(row, bin) in &feat.entries {
                    let slot = row_slot[row as usize];
                    if slot != u32::MAX {
                        let k = slot as usize * nb + bin as usize;
                        sums[k] += residuals[row as usize];
                        counts[k] += 1;
                    }
                }
                nodes
                    .iter()
                    .enumerate()
                    .map(|(s, node)| {
                        let hs = &mut sums[s * nb..(s + 1) * nb];
                        let hc = &mut counts[s * nb..(s + 1) * nb];
                        let d = feat.default_bin as usize;
                        let (other_sum, other_count) = hs
                            .iter()
                            .zip(hc.iter())
                            .enumerate()
                            .filter(|&(b, _)| b != d)
                            .fold((0.0, 0), |(a, c), (_, (s, n))| (a + s, c + n));
                        hs[d] = node.sum - other_sum;
                        hc[d] = node.rows.len() - other_count;
                        best_cut(hs, hc, node, self.min_leaf)
                    })
                    .collect()
            })
            .collect();
        reduce_features(nodes.len(), &per_feature, |f, bin| self.binned.features[f].thresholds[bin])
    }
}

/// Best `(gain, cut)` where `cut` is the last bin/position sent left.
fn best_cut(sums: &[f64], counts: &[usize], node: &OpenNode, min_leaf: usize) -> Option<(f64, usize)> {
    let n = node.rows.len();
    let min_gain = MIN_RELATIVE_GAIN * node.sum_sq;
    let mut best: Option<(f64, usize)> = None;
    let (mut sum_l, mut n_l) = (0.0, 0usize);
    for b in 0..sums.len() - 1 {
        sum_l += sums[b];
        n_l += counts[b];
        if counts[b] == 0 && b > 0 {
            // same partition as the previous cut
            continue;
        }
        let n_r = n - n_l;
        if n_l < min_leaf || n_r < min_leaf {
            continue;
        }
        let gain = split_gain(sum_l, n_l, node.sum - sum_l, n_r, node.sum, n);
        if gain > min_gain && best.is_none_or(|(g, _)| gain > g) {
            best = Some((gain, b));
        }
    }
    best
}

fn reduce_features(
    n_nodes: usize,
    per_feature: &[Vec<Option<(f64, usize)>>],
    threshold: impl Fn(usize, usize) -> f64,
) -> Vec<Option<Candidate>> {
    (0..n_nodes)
        .map(|s| {
            let mut best: Option<Candidate> = None;
            for (f, cands) in per_feature.iter().enumerate() {
                if let Some((gain, cut)) = cands[s] {
                    if best.is_none_or(|b| gain > b.gain) {
                        best = Some(Candidate { feature: f, threshold: threshold(f, cut), gain });
                    }
                }
            }
            best
        })
        .collect()
}

/// Reference splitter: sorts each node's rows per feature and tries every gap.
struct ExactFinder<'a> {
    x: &'a Matrix,
    min_leaf: usize,
}

impl SplitFinder for ExactFinder<'_> {
    fn find(&self, nodes: &[OpenNode], residuals: &[f64], _row_slot: &[u32]) -> Vec<Option<Candidate>> {
        nodes
            .iter()
            .map(|node| {
                let n = node.rows.len();
                let min_gain = MIN_RELATIVE_GAIN * node.sum_sq;
                let per_feature: Vec<Option<Candidate>> = (0..self.x.n_cols())
                    .into_par_iter()
                    .map(|f| {
                        let mut pairs: Vec<(f64, u32)> =
                            node.rows.iter().map(|&r| (self.x.get(r as usize, f), r)).collect();
                        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                        let mut best: Option<Candidate> = None;
                        let mut sum_l = 0.0;
                        for i in 0..n - 1 {
                            sum_l += residuals[pairs[i].1 as usize];
                            if pairs[i].0 == pairs[i + 1].0 {
                                continue;
                            }
                            let (n_l, n_r) = (i + 1, n - i - 1);
                            if n_l < self.min_leaf || n_r < self.min_leaf {
                                continue;
                            }
                            let gain = split_gain(sum_l, n_l, node.sum - sum_l, n_r, node.sum, n);
                            if gain > min_gain && best.is_none_or(|b| gain > b.gain) {
                                let threshold = midpoint(pairs[i].0, pairs[i + 1].0);
                                best = Some(Candidate { feature: f, threshold, gain });
                            }
                        }
                        best
                    })
                    .collect();
                per_feature
                    .into_iter()
                    .flatten()
                    .fold(None, |acc: Option<Candidate>, c| match acc {
                        Some(b) if c.gain <= b.gain => Some(b),
                        _ => Some(c),
                    })
            })
            .collect()
    }
}

fn node_stats(rows: &[u32], residuals: &[f64]) -> (f64, f64) {
    rows.iter().fold((0.0, 0.0), |(s, q), &r| {
        let v = residuals[r as usize];
        (s + v, q + v * v)
    })
}

fn grow_tree(
    finder: &dyn SplitFinder,
    x: &Matrix,
    residuals: &[f64],
    rows: Vec<u32>,
    params: &TrainParams,
    row_slot: &mut [u32],
) -> Option<Tree> {
    let (sum, sum_sq) = node_stats(&rows, residuals);
    let mut tree = Tree { nodes: Vec::new(), leaves: Vec::new() };
    let mut open = vec![OpenNode { rows, sum, sum_sq, depth: 0, slot: ParentSlot::Root }];

    let attach = |tree: &mut Tree, slot: ParentSlot, child: Child| match slot {
        ParentSlot::Root => {}
        ParentSlot::Left(p) => tree.nodes[p].left = child,
        ParentSlot::Right(p) => tree.nodes[p].right = child,
    };

    while !open.is_empty() {
        let (splittable, finished): (Vec<OpenNode>, Vec<OpenNode>) = open
            .into_iter()
            .partition(|n| n.depth < params.max_depth && n.rows.len() >= 2 * params.min_samples_leaf);
        for node in finished {
            let leaf = tree.leaves.len();
            tree.leaves.push(node.sum / node.rows.len() as f64);
            attach(&mut tree, node.slot, Child::Leaf(leaf));
        }
        for (s, node) in splittable.iter().enumerate() {
            for &r in &node.rows {
                row_slot[r as usize] = s as u32;
            }
        }
        let found = if splittable.is_empty() { Vec::new() } else { finder.find(&splittable, residuals, row_slot) };
        for node in &splittable {
            for &r in &node.rows {
                row_slot[r as usize] = u32::MAX;
            }
        }

        let mut next = Vec::new();
        for (node, cand) in splittable.into_iter().zip(found) {
            let Some(c) = cand else {
                let leaf = tree.leaves.len();
                tree.leaves.push(node.sum / node.rows.len() as f64);
                attach(&mut tree, node.slot, Child::Leaf(leaf));
                continue;
            };
            let id = tree.nodes.len();
            tree.nodes.push(SplitNode {
                feature: c.feature,
                threshold: c.threshold,
                left: Child::Leaf(usize::MAX),
                right: Child::Leaf(usize::MAX),
            });
            attach(&mut tree, node.slot, Child::Node(id));
            let (left, right): (Vec<u32>, Vec<u32>) =
                node.rows.iter().partition(|&&r| x.get(r as usize, c.feature) <= c.threshold);
            for (rows, slot) in [(left, ParentSlot::Left(id)), (right, ParentSlot::Right(id))] {
                let (sum, sum_sq) = node_stats(&rows, residuals);
                next.push(OpenNode { rows, sum, sum_sq, depth: node.depth + 1, slot });
            }
        }
        open = next;
    }
    if tree.nodes.is_empty() {
        // The root could not be split; a lone leaf only shifts by the mean residual.
        return None;
    }
    Some(tree)
}

fn mse(y: &[f64], pred: &[f64]) -> f64 {
    y.iter().zip(pred).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / y.len() as f64
}

fn mae(y: &[f64], pred: &[f64]) -> f64 {
    y.iter().zip(pred).map(|(a, b)| (a - b).abs()).sum::<f64>() / y.len() as f64
}

fn check_finite(x: &Matrix, y: &[f64]) -> Result<(), GbdtError> {
    if let Some(i) = x.data().iter().position(|v| !v.is_finite()) {
        return Err(GbdtError::NonFinite(format!("feature value at row {} column {}", i / x.n_cols(), i % x.n_cols())));
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(GbdtError::NonFinite(format!("target at row {i}")));
    }
    Ok(())
}

fn sample_rows(n: usize, fraction: f64, seed: u64, tree: usize) -> Vec<u32> {
    if fraction >= 1.0 {
        return (0..n as u32).collect();
    }
    let m = ((n as f64 * fraction).round() as usize).clamp(1, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add((tree as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)));
    let mut idx: Vec<u32> = (0..n as u32).collect();
    for i in 0..m {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    idx.truncate(m);
    idx.sort_unstable();
    idx
}

/// Fits a least-squares boosted ensemble to `(x, y)`.
///
/// `valid`, when given, is scored with MAE after every tree and drives early
/// stopping. With `subsample = 1` the train MSE in the report never increases.
pub fn train(
    x: &Matrix,
    y: &[f64],
    valid: Option<(&Matrix, &[f64])>,
    params: &TrainParams,
) -> Result<(GbdtModel, TrainReport), GbdtError> {
    params.validate()?;
    if x.n_rows() != y.len() {
        return Err(GbdtError::DimensionMismatch { expected: x.n_rows(), found: y.len() });
    }
    if y.len() < 2 {
        return Err(GbdtError::TooFewRows(y.len()));
    }
    check_finite(x, y)?;
    if let Some((vx, vy)) = valid {
        if vx.n_cols() != x.n_cols() {
            return Err(GbdtError::DimensionMismatch { expected: x.n_cols(), found: vx.n_cols() });
        }
        if vx.n_rows() != vy.len() {
            return Err(GbdtError::DimensionMismatch { expected: vx.n_rows(), found: vy.len() });
        }
        check_finite(vx, vy)?;
    }

    let n = y.len();
    let base = y.iter().sum::<f64>() / n as f64;
    let mut model = GbdtModel::constant(base, x.n_cols(), params.clone());
    let mut pred = vec![base; n];
    let initial_train_mse = mse(y, &pred);
    let mut report = TrainReport {
        initial_train_mse,
        iterations: Vec::new(),
        degenerate: false,
        trees_kept: 0,
        stopped_early: false,
    };
    if y.iter().all(|&v| v == y[0]) {
        model.base_prediction = y[0];
        report.degenerate = true;
        return Ok((model, report));
    }

    let binned;
    let histogram;
    let exact;
    let finder: &dyn SplitFinder = match params.splitter {
        Splitter::Histogram => {
            binned = BinnedMatrix::build(x, params.n_histogram_bins);
            histogram = HistogramFinder { binned: &binned, min_leaf: params.min_samples_leaf };
            &histogram
        }
        Splitter::Exact => {
            exact = ExactFinder { x, min_leaf: params.min_samples_leaf };
            &exact
        }
    };

    let mut valid_pred = valid.map(|(vx, _)| vec![base; vx.n_rows()]);
    let mut best_valid = (f64::INFINITY, 0usize);
    let mut residuals = vec![0.0; n];
    let mut row_slot = vec![u32::MAX; n];
    let lr = params.learning_rate;

    for t in 0..params.n_trees {
        for i in 0..n {
            residuals[i] = y[i] - pred[i];
        }
        let rows = sample_rows(n, params.subsample, params.seed, t);
        let Some(tree) = grow_tree(finder, x, &residuals, rows, params, &mut row_slot) else {
            log::debug!("no admissible split at iteration {t}; stopping");
            break;
        };
        for (i, p) in pred.iter_mut().enumerate() {
            *p += lr * tree.predict(x.row(i));
        }
        let valid_mae = match (valid, valid_pred.as_mut()) {
            (Some((vx, vy)), Some(vp)) => {
                for (i, p) in vp.iter_mut().enumerate() {
                    *p += lr * tree.predict(vx.row(i));
                }
                Some(mae(vy, vp))
            }
            _ => None,
        };
        model.trees.push(tree);
        report.iterations.push(IterationMetrics { iteration: t + 1, train_mse: mse(y, &pred), valid_mae });

        if let (Some(v), Some(rounds)) = (valid_mae, params.early_stopping_rounds) {
            if v < best_valid.0 {
                best_valid = (v, t + 1);
            } else if t + 1 - best_valid.1 >= rounds {
                model.trees.truncate(best_valid.1);
                report.stopped_early = true;
                break;
            }
        }
    }
    report.trees_kept = model.trees.len();
    Ok((model, report))
}
