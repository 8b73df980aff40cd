//! Invariants checked over generated inputs.

#![allow(clippy::needless_range_loop)]

mod common;

use clusterlab::dataset::{
    build_dataset, drop_missing_rows, parse_arff, parse_csv, write_arff, write_csv, Cell, CsvConfig,
};
use clusterlab::kmeans::{kmeans, wss, KMeansConfig};
use clusterlab::metrics::{pairwise, Metric};
use clusterlab::pam::{pam, pam_cost, PamConfig};
use clusterlab::projection::pca_2d;
use clusterlab::validation::silhouette;
use clusterlab::{Matrix, RawTable};
use common::*;
use proptest::prelude::*;

fn matrix_strategy(max_n: usize, max_d: usize) -> impl Strategy<Value = Matrix> {
    (2..=max_n, 1..=max_d).prop_flat_map(|(n, d)| {
        prop::collection::vec(-50.0..50.0f64, n * d)
            .prop_map(move |v| Matrix::from_vec(n, d, v).unwrap())
    })
}

fn cell_strategy() -> impl Strategy<Value = Cell> {
    prop_oneof![
        4 => (-1.0e6..1.0e6f64).prop_map(Cell::Number),
        4 => (0i32..20).prop_map(|v| Cell::Number(v as f64)),
        1 => Just(Cell::Missing),
    ]
}

fn table_strategy() -> impl Strategy<Value = RawTable> {
    (1..6usize, 0..25usize).prop_flat_map(|(cols, rows)| {
        prop::collection::vec(prop::collection::vec(cell_strategy(), cols), rows).prop_map(
            move |cells| {
                let names = (0..cols).map(|j| format!("attr {j}")).collect();
                RawTable::new(names, cells).unwrap()
            },
        )
    })
}

/// Labels that use every cluster in `0..k` at least once.
fn labels_strategy(n: usize, k: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..k, n).prop_map(move |mut l| {
        for c in 0..k.min(n) {
            l[c] = c;
        }
        l
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn arff_round_trip(table in table_strategy()) {
        let bytes = write_arff(&table, "generated");
        let back = parse_arff(&bytes[..]).unwrap();
        prop_assert_eq!(back, table);
    }

    #[test]
    fn csv_round_trip(table in table_strategy()) {
        let bytes = write_csv(&table, b',', "?");
        let cfg = CsvConfig { has_header: true, ..CsvConfig::default() };
        let back = parse_csv(&bytes[..], &cfg).unwrap();
        prop_assert_eq!(back, table);
    }

    #[test]
    fn drop_missing_keeps_complete_rows_in_order(table in table_strategy()) {
        let (kept, dropped) = drop_missing_rows(&table);
        prop_assert_eq!(kept.n_rows() + dropped.len(), table.n_rows());
        prop_assert!(kept.cells().iter().all(|r| r.iter().all(|c| !c.is_missing())));
        let expected: Vec<_> = table
            .cells()
            .iter()
            .filter(|r| r.iter().all(|c| !c.is_missing()))
            .cloned()
            .collect();
        prop_assert_eq!(kept.cells(), &expected[..]);
        prop_assert!(dropped.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn min_max_hits_both_endpoints(table in table_strategy()) {
        let (complete, _) = drop_missing_rows(&table);
        prop_assume!(complete.n_rows() > 0);
        let (ds, report) = build_dataset(&complete, None, None, true).unwrap();
        for (j, p) in report.norm_params.iter().enumerate() {
            let col: Vec<f64> = ds.features().column(j).collect();
            prop_assert!(col.iter().all(|v| (0.0..=1.0).contains(v)));
            if p.max > p.min {
                prop_assert!(col.contains(&0.0));
                prop_assert!(col.contains(&1.0));
            } else {
                prop_assert!(col.iter().all(|&v| v == 0.0));
            }
        }
    }

    #[test]
    fn distances_are_metric(x in matrix_strategy(12, 4)) {
        for metric in [Metric::Euclidean, Metric::Manhattan] {
            let d = pairwise(&x, metric);
            let n = x.nrows();
            for i in 0..n {
                prop_assert_eq!(d.get(i, i), 0.0);
                for j in 0..n {
                    prop_assert_eq!(d.get(i, j), d.get(j, i));
                    prop_assert!(d.get(i, j) >= 0.0);
                    for k in 0..n {
                        prop_assert!(d.get(i, k) <= d.get(i, j) + d.get(j, k) + 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn silhouette_in_range_and_scale_invariant(
        (x, labels) in matrix_strategy(30, 3).prop_flat_map(|x| {
            let n = x.nrows();
            (Just(x), labels_strategy(n, 2.min(n)))
        }),
        factor in 0.01..100.0f64,
    ) {
        let d = pairwise(&x, Metric::Euclidean);
        let a = silhouette(&d, &labels).unwrap();
        prop_assert!(a.widths.iter().all(|s| (-1.0..=1.0).contains(s)));
        let b = silhouette(&d.scaled(factor), &labels).unwrap();
        for (s, t) in a.widths.iter().zip(&b.widths) {
            prop_assert!((s - t).abs() <= 1e-12);
        }
        let oracle = naive_silhouette(&square(&x, Metric::Euclidean), &labels);
        prop_assert_eq!(a.widths, oracle);
    }

    #[test]
    fn kmeans_objective_is_consistent(x in matrix_strategy(40, 3), k in 1..5usize, seed in 0..1000u64) {
        prop_assume!(k <= x.nrows());
        let cfg = KMeansConfig { k, restarts: 3, seed, ..KMeansConfig::default() };
        let p = kmeans(&x, &cfg).unwrap();
        prop_assert!(p.objective_history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-12));
        let centers = p.centroids.as_ref().unwrap();
        let recomputed = wss(&x, &p.labels, centers).unwrap();
        prop_assert!((recomputed - p.objective).abs() <= 1e-9 * (1.0 + p.objective));
        prop_assert!(p.sizes().iter().all(|&s| s > 0));
        let again = kmeans(&x, &cfg).unwrap();
        prop_assert_eq!(p, again);
    }

    #[test]
    fn pam_is_locally_optimal(x in matrix_strategy(25, 3), k in 1..4usize) {
        prop_assume!(k < x.nrows());
        let d = pairwise(&x, Metric::Euclidean);
        let res = pam(&d, &PamConfig::new(k)).unwrap();
        prop_assert!(res.converged);
        let cost = pam_cost(&d, &res.medoid_indices).unwrap();
        prop_assert!((cost - res.cost).abs() <= 1e-9 * (1.0 + cost));
        for slot in 0..k {
            for cand in 0..x.nrows() {
                if res.medoid_indices.contains(&cand) {
                    continue;
                }
                let mut swapped = res.medoid_indices.clone();
                swapped[slot] = cand;
                prop_assert!(pam_cost(&d, &swapped).unwrap() >= cost * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn pca_is_row_permutation_invariant(x in matrix_strategy(20, 4), seed in 0..1000u64) {
        prop_assume!(x.ncols() >= 2);
        let p = pca_2d(&x).unwrap();
        let mut order: Vec<usize> = (0..x.nrows()).collect();
        let mut r = rng(seed);
        rand::seq::SliceRandom::shuffle(&mut order[..], &mut r);
        let q = pca_2d(&x.select_rows(&order)).unwrap();
        let tol = 1e-7 * (1.0 + p.total_variance);
        prop_assert!((p.total_variance - q.total_variance).abs() <= tol);
        for (a, b) in p.eigenvalues.iter().zip(&q.eigenvalues) {
            prop_assert!((a - b).abs() <= tol);
        }
    }
}

#[test]
fn pam_single_swap_optimality_at_scale() {
    for (n, k, seed) in [(200usize, 2usize, 1u64), (150, 3, 2), (120, 4, 3)] {
        let x = random_matrix(n, 3, seed);
        let d = pairwise(&x, Metric::Euclidean);
        let res = pam(&d, &PamConfig::new(k)).unwrap();
        for slot in 0..k {
            for cand in (0..n).filter(|c| !res.medoid_indices.contains(c)) {
                let mut swapped = res.medoid_indices.clone();
                swapped[slot] = cand;
                assert!(pam_cost(&d, &swapped).unwrap() >= res.cost * (1.0 - 1e-12));
            }
        }
    }
}

#[test]
fn pam_recovers_exhaustive_optimum_on_noisy_data() {
    // Not separable; PAM is a local search, so only report how often it is exact.
    let mut exact = 0;
    for seed in 0..20u64 {
        let x = random_matrix(10, 2, seed);
        let d = square(&x, Metric::Euclidean);
        let (opt, _) = exhaustive_pam(&d, 3);
        let got = pam(&pairwise(&x, Metric::Euclidean), &PamConfig::new(3))
            .unwrap()
            .cost;
        assert!(got >= opt * (1.0 - 1e-12));
        if (got - opt).abs() <= 1e-12 * opt {
            exact += 1;
        }
    }
    assert!(
        exact >= 15,
        "PAM found the optimum on only {exact}/20 instances"
    );
}
