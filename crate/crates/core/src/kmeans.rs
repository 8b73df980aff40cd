//! Lloyd's K-means with k-means++ or uniform seeding and best-of-restarts.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::metrics::squared_euclidean;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KMeansInit {
    #[default]
    KMeansPlusPlus,
    Random,
}

impl fmt::Display for KMeansInit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KMeansInit::KMeansPlusPlus => "kmeans++",
            KMeansInit::Random => "random",
        })
    }
}

impl FromStr for KMeansInit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kmeans++" | "k-means++" | "kmeans_plus_plus" | "plusplus" => {
                Ok(KMeansInit::KMeansPlusPlus)
            }
            "random" => Ok(KMeansInit::Random),
            other => Err(Error::InvalidConfig(format!("unknown init {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub k: usize,
    pub init: KMeansInit,
    pub max_iter: usize,
    pub restarts: usize,
    /// Stop once no centroid moves further than this.
    pub tol: f64,
    pub seed: u64,
}

impl KMeansConfig {
    pub fn new(k: usize) -> Self {
        KMeansConfig {
            k,
            ..KMeansConfig::default()
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if n < self.k {
            return Err(Error::TooFewPoints { n, k: self.k });
        }
        if self.max_iter == 0 || self.restarts == 0 {
            return Err(Error::InvalidConfig(
                "max_iter and restarts must be at least 1".into(),
            ));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::InvalidConfig("tol must be non-negative".into()));
        }
        Ok(())
    }
}

impl Default for KMeansConfig {
    fn default() -> Self {
        KMeansConfig {
            k: 2,
            init: KMeansInit::KMeansPlusPlus,
            max_iter: 100,
            restarts: 25,
            tol: 1e-9,
            seed: 42,
        }
    }
}

/// Cluster assignment plus whatever centers the algorithm produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub labels: Vec<usize>,
    pub k: usize,
    /// Within-cluster sum of squares for K-means; total distance for PAM.
    pub objective: f64,
    pub centroids: Option<Matrix>,
    pub medoid_indices: Option<Vec<usize>>,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after each Lloyd iteration of the winning restart.
    #[serde(default)]
    pub objective_history: Vec<f64>,
    /// Index of the restart that produced this partition.
    #[serde(default)]
    pub restart: usize,
}

impl Partition {
    pub fn sizes(&self) -> Vec<usize> {
        cluster_sizes(&self.labels, self.k)
    }
}

pub fn cluster_sizes(labels: &[usize], k: usize) -> Vec<usize> {
    let mut sizes = vec![0; k];
    for &l in labels {
        sizes[l] += 1;
    }
    sizes
}

/// Sum of squared Euclidean distances from each point to its cluster center.
pub fn wss(data: &Matrix, labels: &[usize], centers: &Matrix) -> Result<f64> {
    if labels.len() != data.nrows() {
        return Err(Error::DimensionMismatch {
            left: data.nrows(),
            right: labels.len(),
        });
    }
    let mut total = 0.0;
    for (row, &l) in data.rows().zip(labels) {
        if l >= centers.nrows() {
            return Err(Error::MissingCenter(l));
        }
        total += squared_euclidean(row, centers.row(l));
    }
    Ok(total)
}

pub fn kmeans(data: &Matrix, config: &KMeansConfig) -> Result<Partition> {
    config.validate(data.nrows())?;
    let runs: Vec<Partition> = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(r as u64));
            let init = initial_centers(data, config.k, config.init, &mut rng);
            let mut p = lloyd(data, init, config.max_iter, config.tol);
            p.restart = r;
            p
        })
        .collect();
    // Strictly smaller objective wins, so ties keep the lowest restart index.
    let best = runs
        .into_iter()
        .reduce(|best, p| {
            if p.objective < best.objective {
                p
            } else {
                best
            }
        })
        .expect("restarts >= 1");
    Ok(best)
}

/// Initial centers drawn from the data rows.
pub fn initial_centers<R: Rng>(data: &Matrix, k: usize, init: KMeansInit, rng: &mut R) -> Matrix {
    let n = data.nrows();
    let chosen = match init {
        KMeansInit::Random => index::sample(rng, n, k).into_vec(),
        KMeansInit::KMeansPlusPlus => kmeans_pp_indices(data, k, rng),
    };
    data.select_rows(&chosen)
}

/// k-means++ seeding: first index uniform, then proportional to the squared
/// distance to the nearest chosen center. When all remaining weight is zero
/// (fewer distinct points than `k`), falls back to a uniform pick among rows
/// not yet chosen.
pub fn kmeans_pp_indices<R: Rng>(data: &Matrix, k: usize, rng: &mut R) -> Vec<usize> {
    let n = data.nrows();
    let mut chosen = Vec::with_capacity(k);
    chosen.push(rng.gen_range(0..n));
    let mut nearest: Vec<f64> = data
        .rows()
        .map(|r| squared_euclidean(r, data.row(chosen[0])))
        .collect();
    while chosen.len() < k {
        let total: f64 = nearest.iter().sum();
        let next = if total > 0.0 {
            let target = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in nearest.iter().enumerate() {
                acc += w;
                if w > 0.0 && acc > target {
                    pick = Some(i);
                    break;
                }
            }
            // Rounding can leave `target` just above the final sum.
            pick.unwrap_or_else(|| nearest.iter().rposition(|&w| w > 0.0).expect("total > 0"))
        } else {
            let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            free[rng.gen_range(0..free.len())]
        };
        chosen.push(next);
        let c = data.row(next);
        for (w, row) in nearest.iter_mut().zip(data.rows()) {
            *w = w.min(squared_euclidean(row, c));
        }
    }
    chosen
}

/// Nearest center under squared Euclidean distance, ties to the lowest id.
fn nearest_center(row: &[f64], centers: &Matrix) -> (usize, f64) {
    let mut best = (0, squared_euclidean(row, centers.row(0)));
    for c in 1..centers.nrows() {
        let d = squared_euclidean(row, centers.row(c));
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn lloyd(data: &Matrix, mut centers: Matrix, max_iter: usize, tol: f64) -> Partition {
    let (n, d) = (data.nrows(), data.ncols());
    let k = centers.nrows();
    let mut labels = vec![0usize; n];
    let mut dist = vec![0.0; n];
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iter {
        for (i, row) in data.rows().enumerate() {
            let (c, dd) = nearest_center(row, &centers);
            labels[i] = c;
            dist[i] = dd;
        }
        repair_empty(&mut labels, &mut dist, k);

        let mut next = Matrix::zeros(k, d);
        let mut counts = vec![0usize; k];
        for (row, &l) in data.rows().zip(&labels) {
            counts[l] += 1;
            for (acc, v) in next.row_mut(l).iter_mut().zip(row) {
                *acc += v;
            }
        }
        for (c, &count) in counts.iter().enumerate() {
            for v in next.row_mut(c) {
                *v /= count as f64;
            }
        }

        let shift = (0..k)
            .map(|c| squared_euclidean(centers.row(c), next.row(c)).sqrt())
            .fold(0.0, f64::max);
        centers = next;
        iterations += 1;
        let objective = wss(data, &labels, &centers).expect("labels < k");
        debug_assert!(
            history
                .last()
                .is_none_or(|&prev: &f64| objective <= prev * (1.0 + 1e-12) + 1e-12),
            "objective increased"
        );
        history.push(objective);
        if shift <= tol {
            converged = true;
            break;
        }
    }

    Partition {
        objective: *history.last().expect("max_iter >= 1"),
        labels,
        k,
        centroids: Some(centers),
        medoid_indices: None,
        iterations,
        converged,
        objective_history: history,
        restart: 0,
    }
}

/// Gives every empty cluster the point farthest from its current center, taken
/// from a cluster that can spare it. Ties go to the lowest point index.
fn repair_empty(labels: &mut [usize], dist: &mut [f64], k: usize) {
    let mut counts = cluster_sizes(labels, k);
    for c in 0..k {
        if counts[c] > 0 {
            continue;
        }
        let mut pick: Option<usize> = None;
        for i in 0..labels.len() {
            if counts[labels[i]] > 1 && pick.is_none_or(|p| dist[i] > dist[p]) {
                pick = Some(i);
            }
        }
        let i = pick.expect("n >= k guarantees a donor");
        counts[labels[i]] -= 1;
        counts[c] += 1;
        labels[i] = c;
        dist[i] = 0.0;
    }
}
