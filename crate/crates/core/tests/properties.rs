mod common;

use common::random_instance;
use proptest::prelude::*;
use stiknn_core::analysis::{display_order, pearson_slices};
use stiknn_core::sti::RankedColumns;
use stiknn_core::{
    rank_neighbors, sti_knn, sti_knn_one_test, u_single, u_subset, Dataset, KnnConfig, LabelId,
    LabeledPoint, Metric, Role,
};

fn scaled(ds: &Dataset, c: f64) -> Dataset {
    let points = ds
        .points()
        .iter()
        .map(|p| LabeledPoint::new(p.features.iter().map(|x| x * c).collect(), p.label))
        .collect();
    Dataset::new(points, ds.label_names().to_vec(), ds.role()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn single_test_columns_are_constant(n in 2usize..40, kf in 0.0f64..1.0, seed in any::<u64>()) {
        let k = 1 + ((n - 1) as f64 * kf) as usize;
        let (train, test) = random_instance(n, 1, 2, seed);
        let r = rank_neighbors(&train, &test.point(0).features, Metric::Euclidean).unwrap();
        let m = sti_knn_one_test(&r, &train.labels(), test.label(0), k).unwrap();
        let order = r.order();
        for b in 1..n {
            let j = order[b];
            let first = m.get(order[0], j);
            for &i in &order[..b] {
                prop_assert_eq!(m.get(i, j).to_bits(), first.to_bits());
                prop_assert_eq!(m.get(j, i).to_bits(), first.to_bits());
            }
        }
        for i in 0..n {
            prop_assert_eq!(m.get(i, i), 0.0);
        }
    }

    #[test]
    fn uniform_labels_give_closed_form(n in 2usize..60, kf in 0.0f64..1.0, seed in any::<u64>()) {
        let k = 1 + ((n - 1) as f64 * kf) as usize;
        let (train, test) = random_instance(n, 1, 1, seed);
        let m = sti_knn(&train, &test, &KnnConfig::new(k)).unwrap();
        let want = -2.0 * (n - k) as f64 / (n * (n - 1)) as f64 / k as f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    prop_assert!((m.get(i, j) - want).abs() <= 1e-15);
                }
            }
        }
    }

    #[test]
    fn matrix_invariants(n in 2usize..30, t in 1usize..6, classes in 1u32..4, kf in 0.0f64..1.0, seed in any::<u64>()) {
        let k = 1 + ((n - 1) as f64 * kf) as usize;
        let (train, test) = random_instance(n, t, classes, seed);
        let cfg = KnnConfig::new(k);
        let m = sti_knn(&train, &test, &cfg).unwrap();
        prop_assert!(m.is_symmetric());
        for d in m.diagonal() {
            prop_assert!((0.0..=1.0 / k as f64).contains(&d));
        }
        prop_assert_eq!(m.meta().k, k);
        prop_assert_eq!(m.meta().t, t);
        let again = sti_knn(&train, &test, &cfg).unwrap();
        prop_assert_eq!(m.values(), again.values());
    }

    #[test]
    fn permuting_train_permutes_matrix(n in 2usize..25, seed in any::<u64>(), rot in 0usize..25) {
        let (train, test) = random_instance(n, 3, 3, seed);
        let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
        let shuffled = train.select(&perm).unwrap();
        let cfg = KnnConfig::new(1 + n / 3);
        let base = sti_knn(&train, &test, &cfg).unwrap();
        let moved = sti_knn(&shuffled, &test, &cfg).unwrap();
        let expected = base.permuted(&perm).unwrap();
        prop_assert_eq!(moved.values(), expected.values());
    }

    #[test]
    fn scaling_features_leaves_matrix_unchanged(n in 2usize..25, c in 0.01f64..100.0, seed in any::<u64>()) {
        let (train, test) = random_instance(n, 4, 2, seed);
        let cfg = KnnConfig::new(1 + n / 4);
        let base = sti_knn(&train, &test, &cfg).unwrap();
        let big = sti_knn(&scaled(&train, c), &scaled(&test, c), &cfg).unwrap();
        prop_assert_eq!(base.values(), big.values());
        let r0 = rank_neighbors(&train, &test.point(0).features, Metric::Euclidean).unwrap();
        let scaled_test = scaled(&test, c);
        let r1 = rank_neighbors(&scaled(&train, c), &scaled_test.point(0).features, Metric::Euclidean).unwrap();
        prop_assert_eq!(r0.order(), r1.order());
    }

    #[test]
    fn ranking_is_a_sorted_permutation(n in 1usize..50, seed in any::<u64>()) {
        let (train, test) = random_instance(n, 1, 2, seed);
        let r = rank_neighbors(&train, &test.point(0).features, Metric::Euclidean).unwrap();
        let pos = r.positions();
        for (rank, &i) in r.order().iter().enumerate() {
            prop_assert_eq!(pos[i], rank);
        }
        prop_assert!(r.distances().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn pearson_invariances(xs in prop::collection::vec(-10.0f64..10.0, 3..40), shift in -5.0f64..5.0, scale in 0.1f64..10.0) {
        let ys: Vec<f64> = xs.iter().enumerate().map(|(i, x)| x * x - i as f64).collect();
        if let (Ok(a), Ok(b)) = (pearson_slices(&xs, &ys), pearson_slices(&ys, &xs)) {
            prop_assert!((a - b).abs() < 1e-12);
            let moved: Vec<f64> = xs.iter().map(|x| x * scale + shift).collect();
            let c = pearson_slices(&moved, &ys).unwrap();
            prop_assert!((a - c).abs() < 1e-9);
        }
    }

    #[test]
    fn display_order_is_idempotent(n in 1usize..40, seed in any::<u64>()) {
        let (train, _) = random_instance(n, 1, 3, seed);
        let order = display_order(&train);
        let view = train.select(&order).unwrap();
        prop_assert_eq!(display_order(&view), (0..n).collect::<Vec<_>>());
    }
}

#[test]
fn likelihood_is_additive_below_k() {
    for n in 1..=8usize {
        for k in 1..=n {
            for seed in 0..3 {
                let (train, test) = random_instance(n, 1, 2, seed + 40 * n as u64);
                let r = rank_neighbors(&train, &test.point(0).features, Metric::Euclidean).unwrap();
                let labels = train.labels();
                let y = test.label(0);
                for mask in 0u32..1 << n {
                    let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                    let u = u_subset(&subset, &r, &labels, y, k);
                    let level = u * k as f64;
                    assert!((level - level.round()).abs() < 1e-12);
                    assert!(level.round() as usize <= subset.len().min(k));
                    if subset.len() <= k {
                        let sum: f64 = subset.iter().map(|&i| u_single(labels[i], y, k)).sum();
                        assert!((u - sum).abs() < 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn ranked_columns_cover_superdiagonal() {
    let rows: Vec<Vec<f64>> = (1..=6).map(|x| vec![x as f64]).collect();
    let train = Dataset::from_rows(&rows, &["a", "b", "b", "a", "b", "a"], Role::Train).unwrap();
    let r = rank_neighbors(&train, &[0.0], Metric::Euclidean).unwrap();
    let cols = RankedColumns::compute(&r, &train.labels(), LabelId(0), 2).unwrap();
    assert_eq!(cols.columns()[0], 0.0);
    for j in 1..6 {
        assert_eq!(cols.value(0, j), cols.columns()[j]);
    }
}
