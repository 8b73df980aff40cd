//! Shared fixtures and independent reference implementations for the
//! integration tests. Nothing here calls into the code paths it checks.

#![allow(dead_code, clippy::needless_range_loop)]

use std::path::PathBuf;

use clusterlab::dataset::{parse_csv, preprocess, CsvConfig, PreprocessOptions, WBC_COLUMNS};
use clusterlab::{Dataset, Matrix, Metric, RawTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn wbc_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/breast-cancer-wisconsin.data")
}

pub fn wbc_table() -> RawTable {
    let bytes = std::fs::read(wbc_path()).expect("dataset file present");
    let cfg = CsvConfig {
        column_names: Some(WBC_COLUMNS.iter().map(|s| s.to_string()).collect()),
        ..CsvConfig::default()
    };
    parse_csv(&bytes[..], &cfg).expect("dataset parses")
}

pub fn wbc_dataset(normalize: bool) -> Dataset {
    let opts = PreprocessOptions {
        id_column: Some(WBC_COLUMNS[0].into()),
        label_column: Some(WBC_COLUMNS[10].into()),
        normalize,
    };
    preprocess(&wbc_table(), &opts).expect("preprocess").0
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(n: usize, d: usize, seed: u64) -> Matrix {
    let mut r = rng(seed);
    Matrix::from_vec(n, d, (0..n * d).map(|_| r.gen::<f64>()).collect()).unwrap()
}

/// `groups` tight blobs, 100 units apart on the diagonal.
pub fn blobs(sizes: &[usize], d: usize, spread: f64, seed: u64) -> Matrix {
    let mut r = rng(seed);
    let mut rows = Vec::new();
    for (g, &size) in sizes.iter().enumerate() {
        for _ in 0..size {
            rows.push(
                (0..d)
                    .map(|_| 100.0 * g as f64 + spread * r.gen::<f64>())
                    .collect::<Vec<f64>>(),
            );
        }
    }
    Matrix::from_rows(&rows).unwrap()
}

// ---- distance oracle -------------------------------------------------------

pub fn naive_distance(a: &[f64], b: &[f64], metric: Metric) -> f64 {
    let mut acc = 0.0;
    for k in 0..a.len() {
        let d = a[k] - b[k];
        acc += match metric {
            Metric::Manhattan => d.abs(),
            _ => d * d,
        };
    }
    if metric == Metric::Euclidean {
        acc.sqrt()
    } else {
        acc
    }
}

/// Upper triangle, row by row.
pub fn naive_pairwise(x: &Matrix, metric: Metric) -> Vec<f64> {
    let n = x.nrows();
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(naive_distance(x.row(i), x.row(j), metric));
        }
    }
    out
}

/// Full square distance table.
pub fn square(x: &Matrix, metric: Metric) -> Vec<Vec<f64>> {
    let n = x.nrows();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        0.0
                    } else {
                        naive_distance(x.row(i.min(j)), x.row(i.max(j)), metric)
                    }
                })
                .collect()
        })
        .collect()
}

// ---- silhouette oracle -----------------------------------------------------

/// Textbook silhouette over a square distance table.
pub fn naive_silhouette(d: &[Vec<f64>], labels: &[usize]) -> Vec<f64> {
    let n = labels.len();
    let k = labels.iter().max().unwrap() + 1;
    let mut out = vec![0.0; n];
    for i in 0..n {
        let own = labels[i];
        let own_size = labels.iter().filter(|&&l| l == own).count();
        if own_size == 1 {
            continue;
        }
        let mut a_sum = 0.0;
        for j in 0..n {
            if j != i && labels[j] == own {
                a_sum += d[i][j];
            }
        }
        let a = a_sum / (own_size - 1) as f64;
        let mut b = f64::INFINITY;
        for c in 0..k {
            let size = labels.iter().filter(|&&l| l == c).count();
            if c == own || size == 0 {
                continue;
            }
            let mut s = 0.0;
            for j in 0..n {
                if j != i && labels[j] == c {
                    s += d[i][j];
                }
            }
            b = b.min(s / size as f64);
        }
        let m = a.max(b);
        out[i] = if m > 0.0 { (b - a) / m } else { 0.0 };
    }
    out
}

// ---- exhaustive clustering oracles -----------------------------------------

/// Minimum WSS over every split of the rows into two non-empty groups.
pub fn exhaustive_kmeans2(x: &Matrix) -> f64 {
    let n = x.nrows();
    let d = x.ncols();
    let mut best = f64::INFINITY;
    // Row n-1 always sits in group 0, so each bipartition is visited once.
    for mask in 1u32..(1 << (n - 1)) {
        let in_one = |i: usize| i < n - 1 && (mask >> i) & 1 == 1;
        let mut total = 0.0;
        for g in [false, true] {
            let members: Vec<usize> = (0..n).filter(|&i| in_one(i) == g).collect();
            let mut c = vec![0.0; d];
            for &i in &members {
                for k in 0..d {
                    c[k] += x.get(i, k);
                }
            }
            for v in &mut c {
                *v /= members.len() as f64;
            }
            for &i in &members {
                for k in 0..d {
                    total += (x.get(i, k) - c[k]).powi(2);
                }
            }
        }
        best = best.min(total);
    }
    best
}

/// All k-subsets of 0..n in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn medoid_cost(d: &[Vec<f64>], medoids: &[usize]) -> f64 {
    (0..d.len())
        .map(|i| {
            medoids
                .iter()
                .map(|&m| d[i][m])
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

/// Global optimum of the k-medoids objective by enumeration.
pub fn exhaustive_pam(d: &[Vec<f64>], k: usize) -> (f64, Vec<usize>) {
    combinations(d.len(), k)
        .into_iter()
        .map(|m| (medoid_cost(d, &m), m))
        .fold(
            (f64::INFINITY, vec![]),
            |b, c| if c.0 < b.0 { c } else { b },
        )
}

// ---- eigen oracle ----------------------------------------------------------

fn det(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        for r in (col + 1)..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    det
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(piv, col);
        b.swap(piv, col);
        for r in (col + 1)..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = ((r + 1)..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

fn shifted(a: &[Vec<f64>], lambda: f64) -> Vec<Vec<f64>> {
    let mut m = a.to_vec();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    m
}

/// Eigenpairs of a symmetric matrix, eigenvalues descending: roots of the
/// characteristic polynomial by grid scan + bisection, vectors by inverse
/// iteration. Requires well-separated eigenvalues.
pub fn eigen_oracle(a: &[Vec<f64>]) -> Vec<(f64, Vec<f64>)> {
    let n = a.len();
    let radius = (0..n)
        .map(|i| {
            a[i][i].abs()
                + (0..n)
                    .filter(|&j| j != i)
                    .map(|j| a[i][j].abs())
                    .sum::<f64>()
        })
        .fold(0.0, f64::max);
    let (lo, hi) = (-radius - 1e-9, radius + 1e-9);
    let f = |l: f64| det(shifted(a, l));
    let steps = 200_000;
    let mut roots = Vec::new();
    let mut prev_x = lo;
    let mut prev_f = f(lo);
    for s in 1..=steps {
        let x = lo + (hi - lo) * s as f64 / steps as f64;
        let fx = f(x);
        if fx == 0.0 {
            roots.push(x);
        } else if prev_f != 0.0 && (fx > 0.0) != (prev_f > 0.0) {
            let (mut l, mut h, mut fl) = (prev_x, x, prev_f);
            for _ in 0..200 {
                let mid = 0.5 * (l + h);
                let fm = f(mid);
                if fm == 0.0 || h - l <= 4.0 * f64::EPSILON * mid.abs().max(1e-300) {
                    l = mid;
                    h = mid;
                    break;
                }
                if (fm > 0.0) == (fl > 0.0) {
                    l = mid;
                    fl = fm;
                } else {
                    h = mid;
                }
            }
            roots.push(0.5 * (l + h));
        }
        prev_x = x;
        prev_f = fx;
    }
    assert_eq!(roots.len(), n, "oracle needs distinct eigenvalues");
    roots.sort_by(|x, y| y.total_cmp(x));
    roots
        .into_iter()
        .map(|lambda| {
            let shift = lambda + 1e-10 * radius.max(1.0);
            let mut v = vec![1.0; n];
            for _ in 0..8 {
                v = solve(shifted(a, shift), v);
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.iter_mut().for_each(|x| *x /= norm);
            }
            (lambda, v)
        })
        .collect()
}
