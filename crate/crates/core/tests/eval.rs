use affscreen::eval::{binned_mae, classify_accuracy, mae};
use proptest::prelude::*;

fn paired(max: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1..max).prop_flat_map(|n| {
        (prop::collection::vec(-5.0f64..15.0, n), prop::collection::vec(-5.0f64..15.0, n))
    })
}

proptest! {
    #[test]
    fn weighted_bins_recombine_to_global((pred, truth) in paired(200), cuts in prop::collection::vec(-5.0f64..15.0, 0..20)) {
        let mut edges = vec![-5.0, 15.0];
        edges.extend(cuts);
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        let curve = binned_mae(&pred, &truth, &edges).unwrap();
        let n = truth.len();
        prop_assert_eq!(curve.bins.iter().map(|b| b.count).sum::<usize>() + curve.out_of_range, n);
        let weighted: f64 = curve.bins.iter().filter_map(|b| b.mae.map(|m| m * b.count as f64)).sum();
        prop_assert!((weighted / n as f64 - mae(&pred, &truth).unwrap()).abs() <= 1e-12);
        prop_assert!(curve.bins.iter().all(|b| (b.count == 0) == b.mae.is_none()));
    }

    #[test]
    fn self_classification_is_perfect(x in prop::collection::vec(-5.0f64..15.0, 1..100), t in -5.0f64..15.0) {
        prop_assert_eq!(classify_accuracy(&x, &x, t).unwrap(), 1.0);
    }

    #[test]
    fn mae_translation_invariant((pred, truth) in paired(100), c in -10.0f64..10.0) {
        let shifted = |v: &[f64]| v.iter().map(|x| x + c).collect::<Vec<_>>();
        let a = mae(&pred, &truth).unwrap();
        let b = mae(&shifted(&pred), &shifted(&truth)).unwrap();
        prop_assert!((a - b).abs() <= 1e-9);
    }

    #[test]
    fn mae_permutation_invariant((pred, truth) in paired(100), seed in any::<u64>()) {
        let mut idx: Vec<usize> = (0..pred.len()).collect();
        let mut s = seed;
        for i in (1..idx.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            idx.swap(i, (s >> 33) as usize % (i + 1));
        }
        let p: Vec<f64> = idx.iter().map(|&i| pred[i]).collect();
        let t: Vec<f64> = idx.iter().map(|&i| truth[i]).collect();
        prop_assert!((mae(&p, &t).unwrap() - mae(&pred, &truth).unwrap()).abs() <= 1e-12);
        prop_assert!(mae(&pred, &truth).unwrap() >= 0.0);
    }
}

#[test]
fn single_bin_equals_global() {
    let pred = [1.0, 2.5, 7.0];
    let truth = [1.5, 2.0, 6.0];
    let curve = binned_mae(&pred, &truth, &[0.0, 10.0]).unwrap();
    assert_eq!(curve.bins.len(), 1);
    assert_eq!(curve.bins[0].mae, Some(mae(&pred, &truth).unwrap()));
}
