use affscreen::gbdt::{train, GbdtError, GbdtModel, Matrix, Splitter, TrainParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn linear_data(n: usize, seed: u64) -> (Matrix, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.1).unwrap();
    let xs: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let ys = xs.iter().map(|&x| 3.0 * x + noise.sample(&mut rng)).collect();
    (Matrix::new(n, 1, xs).unwrap(), ys)
}

/// Features with few distinct values, so the histogram sees every gap.
fn discrete_data(n: usize, cols: usize, seed: u64) -> (Matrix, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(n * cols);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = (0..cols).map(|c| rng.random_range(0..(3 + 20 * c)) as f64).collect();
        y.push(row[0] * 0.7 - (row[1] - 10.0).abs() * 0.2 + rng.random_range(-0.5..0.5));
        data.extend(row);
    }
    (Matrix::new(n, cols, data).unwrap(), y)
}

fn train_mae(m: &GbdtModel, x: &Matrix, y: &[f64]) -> f64 {
    let p = m.predict_batch(x).unwrap();
    p.iter().zip(y).map(|(a, b)| (a - b).abs()).sum::<f64>() / y.len() as f64
}

#[test]
fn linear_fit_matches_exact_splitter() {
    let (x, y) = linear_data(1000, 1);
    let base = TrainParams { n_trees: 200, max_depth: 3, ..Default::default() };
    let (hist, _) = train(&x, &y, None, &base).unwrap();
    let (exact, _) = train(&x, &y, None, &TrainParams { splitter: Splitter::Exact, ..base }).unwrap();
    let (mh, me) = (train_mae(&hist, &x, &y), train_mae(&exact, &x, &y));
    assert!(mh < 0.2, "histogram MAE {mh}");
    println!("train MAE histogram {mh:.4} exact {me:.4}");
    assert!((mh - me).abs() <= 0.1 * me, "histogram {mh} vs exact {me}");
}

#[test]
fn train_loss_never_increases() {
    for seed in 0..5 {
        let (x, y) = discrete_data(300, 4, seed);
        let p = TrainParams { n_trees: 60, max_depth: 4, learning_rate: 0.3, min_samples_leaf: 3, ..Default::default() };
        let (_, report) = train(&x, &y, None, &p).unwrap();
        let mut prev = report.initial_train_mse;
        for it in &report.iterations {
            assert!(it.train_mse <= prev, "iteration {} rose {} -> {}", it.iteration, prev, it.train_mse);
            prev = it.train_mse;
        }
    }
}

#[test]
fn training_is_deterministic() {
    let (x, y) = discrete_data(400, 5, 9);
    let p = TrainParams { n_trees: 40, min_samples_leaf: 4, ..Default::default() };
    let (a, ra) = train(&x, &y, None, &p).unwrap();
    let (b, rb) = train(&x, &y, None, &p).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(ra, rb);
    let sub = TrainParams { subsample: 0.7, seed: 3, ..p };
    assert_eq!(train(&x, &y, None, &sub).unwrap().0, train(&x, &y, None, &sub).unwrap().0);
}

#[test]
fn histogram_equals_exact_on_few_distinct_values() {
    for seed in 0..4 {
        let (x, y) = discrete_data(250, 3, 100 + seed);
        let p = TrainParams { n_trees: 15, max_depth: 3, learning_rate: 0.5, min_samples_leaf: 2, ..Default::default() };
        let (h, _) = train(&x, &y, None, &p).unwrap();
        let (e, _) = train(&x, &y, None, &TrainParams { splitter: Splitter::Exact, ..p }).unwrap();
        assert_eq!(h.trees.len(), e.trees.len());
        for (th, te) in h.trees.iter().zip(&e.trees) {
            assert_eq!(th.nodes.len(), te.nodes.len());
            for (a, b) in th.nodes.iter().zip(&te.nodes) {
                assert_eq!(a.feature, b.feature);
            }
            // Node-local and global midpoints can differ, the partitions cannot.
            for r in x.rows() {
                assert_eq!(th.leaf_index(r), te.leaf_index(r));
            }
        }
        let (ph, pe) = (h.predict_batch(&x).unwrap(), e.predict_batch(&x).unwrap());
        for (a, b) in ph.iter().zip(&pe) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn min_samples_leaf_respected() {
    let (x, y) = discrete_data(500, 4, 42);
    for msl in [1, 7, 25] {
        for splitter in [Splitter::Histogram, Splitter::Exact] {
            let p = TrainParams { n_trees: 10, max_depth: 6, min_samples_leaf: msl, splitter, ..Default::default() };
            let (m, _) = train(&x, &y, None, &p).unwrap();
            for t in &m.trees {
                let mut counts = vec![0usize; t.leaves.len()];
                for r in x.rows() {
                    counts[t.leaf_index(r)] += 1;
                }
                assert!(counts.iter().all(|&c| c >= msl), "msl {msl}: {counts:?}");
                assert!(t.depth() <= 6);
            }
        }
    }
}

#[test]
fn save_load_round_trip() {
    let (x, y) = discrete_data(300, 4, 5);
    let (m, _) = train(&x, &y, None, &TrainParams { n_trees: 30, min_samples_leaf: 3, ..Default::default() }).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    m.save(&path).unwrap();
    let loaded = GbdtModel::load(&path).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..100 {
        let row: Vec<f64> = (0..4).map(|_| rng.random_range(-5.0..70.0)).collect();
        assert_eq!(m.predict(&row).unwrap().to_bits(), loaded.predict(&row).unwrap().to_bits());
    }
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, &text[..text.len() - 7]).unwrap();
    assert!(matches!(GbdtModel::load(&path), Err(GbdtError::CorruptModel(_))));
    assert!(matches!(GbdtModel::load(&dir.path().join("missing.json")), Err(GbdtError::Io(_))));
}

#[test]
fn constant_extra_column_changes_nothing() {
    let (x, y) = discrete_data(300, 3, 8);
    let widened: Vec<Vec<f64>> = x.rows().map(|r| [r, &[1.25]].concat()).collect();
    let xw = Matrix::from_rows(&widened).unwrap();
    let p = TrainParams { n_trees: 25, min_samples_leaf: 3, ..Default::default() };
    let (a, _) = train(&x, &y, None, &p).unwrap();
    let (b, _) = train(&xw, &y, None, &p).unwrap();
    for (r, rw) in x.rows().zip(xw.rows()) {
        assert_eq!(a.predict(r).unwrap(), b.predict(rw).unwrap());
    }
}

#[test]
fn batch_equals_rowwise() {
    let (x, y) = linear_data(200, 3);
    let (m, _) = train(&x, &y, None, &TrainParams { n_trees: 20, min_samples_leaf: 2, ..Default::default() }).unwrap();
    let batch = m.predict_batch(&x).unwrap();
    let single: Vec<f64> = x.rows().map(|r| m.predict(r).unwrap()).collect();
    assert_eq!(batch, single);
    let wrong = Matrix::new(1, 2, vec![0.0, 0.0]).unwrap();
    assert!(matches!(m.predict_batch(&wrong), Err(GbdtError::DimensionMismatch { expected: 1, found: 2 })));
}

#[test]
fn early_stopping_truncates_to_best_iteration() {
    let (x, y) = linear_data(400, 11);
    let (vx, vy) = linear_data(200, 12);
    let p = TrainParams {
        n_trees: 2000,
        max_depth: 6,
        learning_rate: 0.5,
        min_samples_leaf: 1,
        early_stopping_rounds: Some(10),
        ..Default::default()
    };
    let (m, report) = train(&x, &y, Some((&vx, &vy)), &p).unwrap();
    assert!(report.stopped_early);
    let best = report
        .iterations
        .iter()
        .min_by(|a, b| a.valid_mae.unwrap().total_cmp(&b.valid_mae.unwrap()))
        .unwrap();
    assert_eq!(m.trees.len(), best.iteration);
    assert_eq!(report.trees_kept, best.iteration);
    assert_eq!(report.iterations.len(), best.iteration + 10);
}
