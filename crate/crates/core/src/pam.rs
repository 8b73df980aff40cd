//! Partitioning Around Medoids: greedy BUILD followed by best-improvement SWAP.
//!
//! Works directly on a [`DistanceMatrix`]; fully deterministic.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kmeans::Partition;
use crate::metrics::{DistanceMatrix, Metric};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PamConfig {
    pub k: usize,
    pub max_swap_iters: usize,
    pub metric: Metric,
}

impl PamConfig {
    pub fn new(k: usize) -> Self {
        PamConfig {
            k,
            ..PamConfig::default()
        }
    }
}

impl Default for PamConfig {
    fn default() -> Self {
        PamConfig {
            k: 2,
            max_swap_iters: 200,
            metric: Metric::Euclidean,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PamResult {
    /// Row indices of the medoids, ascending; cluster `c` is medoid `c`.
    pub medoid_indices: Vec<usize>,
    pub labels: Vec<usize>,
    pub cost: f64,
    pub build_cost: f64,
    pub swaps_performed: usize,
    pub converged: bool,
}

impl PamResult {
    pub fn into_partition(self) -> Partition {
        let k = self.medoid_indices.len();
        Partition {
            labels: self.labels,
            k,
            objective: self.cost,
            centroids: None,
            medoid_indices: Some(self.medoid_indices),
            iterations: self.swaps_performed,
            converged: self.converged,
            objective_history: Vec::new(),
            restart: 0,
        }
    }
}

/// Sum over points of the distance to the closest medoid.
pub fn pam_cost(dist: &DistanceMatrix, medoids: &[usize]) -> Result<f64> {
    let n = dist.len();
    if medoids.is_empty() {
        return Err(Error::InvalidConfig("medoid set is empty".into()));
    }
    for (a, &m) in medoids.iter().enumerate() {
        if m >= n || medoids[..a].contains(&m) {
            return Err(Error::InvalidMedoid(m));
        }
    }
    Ok((0..n)
        .map(|i| {
            medoids
                .iter()
                .map(|&m| dist.get(i, m))
                .fold(f64::INFINITY, f64::min)
        })
        .sum())
}

pub fn pam(dist: &DistanceMatrix, config: &PamConfig) -> Result<PamResult> {
    let n = dist.len();
    let k = config.k;
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    if n < k {
        return Err(Error::TooFewPoints { n, k });
    }

    let mut medoids = build(dist, k);
    let build_cost = pam_cost(dist, &medoids)?;
    let mut cost = build_cost;
    let mut swaps = 0;
    let mut converged = false;

    while swaps < config.max_swap_iters {
        let Some((slot, candidate, new_cost)) = best_swap(dist, &medoids, cost) else {
            converged = true;
            break;
        };
        debug_assert!(new_cost < cost);
        medoids[slot] = candidate;
        cost = new_cost;
        swaps += 1;
    }
    if !converged {
        // The iteration budget ran out; report convergence only if no swap is left.
        converged = best_swap(dist, &medoids, cost).is_none();
    }

    medoids.sort_unstable();
    let labels = assign(dist, &medoids);
    let cost = pam_cost(dist, &medoids)?;
    Ok(PamResult {
        medoid_indices: medoids,
        labels,
        cost,
        build_cost,
        swaps_performed: swaps,
        converged,
    })
}

/// BUILD: the most central point first, then repeatedly the point whose
/// addition reduces total cost the most. Ties go to the lowest index.
fn build(dist: &DistanceMatrix, k: usize) -> Vec<usize> {
    let n = dist.len();
    let row_sum = |i: usize| (0..n).map(|j| dist.get(i, j)).sum::<f64>();
    let first = (0..n)
        .map(|i| (i, row_sum(i)))
        .fold(
            (0, f64::INFINITY),
            |best, (i, s)| if s < best.1 { (i, s) } else { best },
        )
        .0;
    let mut medoids = vec![first];
    let mut nearest: Vec<f64> = (0..n).map(|j| dist.get(j, first)).collect();
    let mut is_medoid = vec![false; n];
    is_medoid[first] = true;

    while medoids.len() < k {
        let gains: Vec<(usize, f64)> = (0..n)
            .into_par_iter()
            .filter(|&c| !is_medoid[c])
            .map(|c| {
                let gain = (0..n)
                    .map(|j| (nearest[j] - dist.get(j, c)).max(0.0))
                    .sum::<f64>();
                (c, gain)
            })
            .collect();
        let (pick, _) = gains
            .into_iter()
            .fold((usize::MAX, f64::NEG_INFINITY), |best, (c, g)| {
                if g > best.1 {
                    (c, g)
                } else {
                    best
                }
            });
        medoids.push(pick);
        is_medoid[pick] = true;
        for (j, d) in nearest.iter_mut().enumerate() {
            *d = d.min(dist.get(j, pick));
        }
    }
    medoids
}

/// Best strictly improving (medoid slot, candidate) exchange, if any.
///
/// Ties on the cost change go to the lowest (medoid row index, candidate
/// index) pair. A swap must lower the cost by more than a relative 1e-12 so
/// rounding noise cannot cycle.
fn best_swap(dist: &DistanceMatrix, medoids: &[usize], cost: f64) -> Option<(usize, usize, f64)> {
    let n = dist.len();
    let k = medoids.len();
    let mut is_medoid = vec![false; n];
    for &m in medoids {
        is_medoid[m] = true;
    }
    // Nearest and second-nearest medoid slot per point.
    let near: Vec<(usize, f64, f64)> = (0..n)
        .map(|j| {
            let (mut s1, mut d1, mut d2) = (0usize, f64::INFINITY, f64::INFINITY);
            for (s, &m) in medoids.iter().enumerate() {
                let d = dist.get(j, m);
                if d < d1 {
                    d2 = d1;
                    d1 = d;
                    s1 = s;
                } else if d < d2 {
                    d2 = d;
                }
            }
            (s1, d1, d2)
        })
        .collect();

    let mut slots: Vec<usize> = (0..k).collect();
    slots.sort_by_key(|&s| medoids[s]);

    let per_slot: Vec<(usize, usize, f64)> = slots
        .par_iter()
        .map(|&slot| {
            let mut best = (usize::MAX, f64::INFINITY);
            for h in (0..n).filter(|&h| !is_medoid[h]) {
                let delta: f64 = near
                    .iter()
                    .enumerate()
                    .map(|(j, &(s1, d1, d2))| {
                        let dh = dist.get(j, h);
                        if s1 == slot {
                            dh.min(d2) - d1
                        } else {
                            dh.min(d1) - d1
                        }
                    })
                    .sum();
                if delta < best.1 {
                    best = (h, delta);
                }
            }
            (slot, best.0, best.1)
        })
        .collect();

    let threshold = -1e-12 * cost.abs().max(f64::MIN_POSITIVE);
    let (slot, h, delta) =
        per_slot
            .into_iter()
            .fold((usize::MAX, usize::MAX, f64::INFINITY), |best, cand| {
                if cand.2 < best.2 {
                    cand
                } else {
                    best
                }
            });
    if h == usize::MAX || delta.is_nan() || delta >= threshold {
        return None;
    }
    let mut trial = medoids.to_vec();
    trial[slot] = h;
    let new_cost = pam_cost(dist, &trial).ok()?;
    (new_cost < cost).then_some((slot, h, new_cost))
}

/// Nearest medoid per point (ties to the lowest cluster id); every medoid is
/// pinned to its own cluster even when it duplicates another medoid.
fn assign(dist: &DistanceMatrix, medoids: &[usize]) -> Vec<usize> {
    let n = dist.len();
    let mut labels: Vec<usize> = (0..n)
        .map(|i| {
            let mut best = (0, dist.get(i, medoids[0]));
            for (c, &m) in medoids.iter().enumerate().skip(1) {
                let d = dist.get(i, m);
                if d < best.1 {
                    best = (c, d);
                }
            }
            best.0
        })
        .collect();
    for (c, &m) in medoids.iter().enumerate() {
        labels[m] = c;
    }
    labels
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use crate::metrics::pairwise;

    fn line(v: &[f64]) -> DistanceMatrix {
        pairwise(
            &Matrix::from_vec(v.len(), 1, v.to_vec()).unwrap(),
            Metric::Euclidean,
        )
    }

    #[test]
    fn k_equals_n() {
        let d = line(&[0.0, 4.0, 9.0]);
        let r = pam(&d, &PamConfig::new(3)).unwrap();
        assert_eq!(r.medoid_indices, vec![0, 1, 2]);
        assert_eq!(r.cost, 0.0);
        assert_eq!(r.labels, vec![0, 1, 2]);
    }

    #[test]
    fn two_groups_on_a_line() {
        let d = line(&[0.0, 1.0, 2.0, 10.0, 11.0, 12.0]);
        let r = pam(&d, &PamConfig::new(2)).unwrap();
        assert_eq!(r.medoid_indices, vec![1, 4]);
        assert_eq!(r.cost, 4.0);
        assert_eq!(r.labels, vec![0, 0, 0, 1, 1, 1]);
        assert!(r.converged);
    }

    #[test]
    fn duplicate_medoids_keep_own_cluster() {
        let d = line(&[1.0, 1.0, 1.0]);
        let r = pam(&d, &PamConfig::new(2)).unwrap();
        assert_eq!(r.medoid_indices.len(), 2);
        for (c, &m) in r.medoid_indices.iter().enumerate() {
            assert_eq!(r.labels[m], c);
        }
    }

    #[test]
    fn cost_helpers() {
        let d = line(&[0.0, 1.0, 3.0]);
        assert_eq!(pam_cost(&d, &[0, 1, 2]).unwrap(), 0.0);
        assert_eq!(pam_cost(&d, &[0]).unwrap(), 4.0);
        assert!(matches!(pam_cost(&d, &[3]), Err(Error::InvalidMedoid(3))));
        assert!(matches!(
            pam_cost(&d, &[1, 1]),
            Err(Error::InvalidMedoid(1))
        ));
    }

    #[test]
    fn too_few_points() {
        let d = line(&[0.0]);
        assert!(matches!(
            pam(&d, &PamConfig::new(2)),
            Err(Error::TooFewPoints { n: 1, k: 2 })
        ));
    }

    #[test]
    fn swap_budget_respected() {
        let d = line(&[0.0, 1.0, 2.0, 10.0, 11.0, 12.0, 30.0]);
        let r = pam(
            &d,
            &PamConfig {
                max_swap_iters: 0,
                ..PamConfig::new(3)
            },
        )
        .unwrap();
        assert_eq!(r.swaps_performed, 0);
        assert_eq!(r.cost, r.build_cost);
    }
}
