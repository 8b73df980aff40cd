//! Silhouette widths and the k-sweep behind the elbow and average-silhouette curves.

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kmeans::{kmeans, KMeansConfig};
use crate::matrix::Matrix;
use crate::metrics::DistanceMatrix;
use crate::pam::{pam, PamConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSilhouette {
    pub cluster: usize,
    pub size: usize,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SilhouetteReport {
    pub widths: Vec<f64>,
    /// One entry per non-empty cluster, ascending by id.
    pub cluster_means: Vec<ClusterSilhouette>,
    pub overall: f64,
    /// Point indices grouped by cluster id, widths descending inside each group.
    pub order: Vec<usize>,
    pub labels: Vec<usize>,
}

/// Silhouette width of every point. Members of singleton clusters get 0, as
/// does a point whose `a` and `b` are both zero.
pub fn silhouette(dist: &DistanceMatrix, labels: &[usize]) -> Result<SilhouetteReport> {
    let n = dist.len();
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: labels.len(),
        });
    }
    let k = labels.iter().max().map_or(0, |&m| m + 1);
    let mut sizes = vec![0usize; k];
    for &l in labels {
        sizes[l] += 1;
    }
    if sizes.iter().filter(|&&s| s > 0).count() < 2 {
        return Err(Error::SingleCluster);
    }

    let widths: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let own = labels[i];
            if sizes[own] == 1 {
                return 0.0;
            }
            let mut sums = vec![0.0; k];
            for j in 0..n {
                if j != i {
                    sums[labels[j]] += dist.get(i, j);
                }
            }
            let a = sums[own] / (sizes[own] - 1) as f64;
            let b = (0..k)
                .filter(|&c| c != own && sizes[c] > 0)
                .map(|c| sums[c] / sizes[c] as f64)
                .fold(f64::INFINITY, f64::min);
            let denom = a.max(b);
            if denom > 0.0 {
                (b - a) / denom
            } else {
                0.0
            }
        })
        .collect();

    debug_assert!(widths.iter().all(|s| (-1.0..=1.0).contains(s)));

    let mut cluster_means = Vec::new();
    for (c, &size) in sizes.iter().enumerate() {
        if size > 0 {
            let total: f64 = (0..n).filter(|&i| labels[i] == c).map(|i| widths[i]).sum();
            cluster_means.push(ClusterSilhouette {
                cluster: c,
                size,
                mean: total / size as f64,
            });
        }
    }
    let overall = widths.iter().sum::<f64>() / n as f64;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        labels[x]
            .cmp(&labels[y])
            .then(widths[y].total_cmp(&widths[x]))
            .then(x.cmp(&y))
    });

    Ok(SilhouetteReport {
        widths,
        cluster_means,
        overall,
        order,
        labels: labels.to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAlgorithm {
    #[default]
    KMeans,
    Pam,
}

impl std::str::FromStr for SweepAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kmeans" | "k-means" => Ok(SweepAlgorithm::KMeans),
            "pam" | "kmedoids" | "k-medoids" => Ok(SweepAlgorithm::Pam),
            other => Err(Error::InvalidConfig(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub algorithm: SweepAlgorithm,
    /// Template; `k` is overwritten per step.
    pub kmeans: KMeansConfig,
    pub pam: PamConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            algorithm: SweepAlgorithm::KMeans,
            kmeans: KMeansConfig::default(),
            pam: PamConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSweepResult {
    pub algorithm: SweepAlgorithm,
    pub ks: Vec<usize>,
    pub avg_silhouette: Vec<f64>,
    /// WSS for K-means, total medoid distance for PAM.
    pub wss: Vec<f64>,
    pub best_k: usize,
}

/// Clusters `data` for every k in `k_range` and scores each partition by
/// average silhouette over `dist`. Ties in the best score go to the smaller k.
pub fn sweep_k(
    data: &Matrix,
    dist: &DistanceMatrix,
    k_range: RangeInclusive<usize>,
    config: &SweepConfig,
) -> Result<KSweepResult> {
    let n = data.nrows();
    if dist.len() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: dist.len(),
        });
    }
    let (lo, hi) = (*k_range.start(), *k_range.end());
    if lo < 2 || hi < lo || hi + 1 > n {
        return Err(Error::InvalidConfig(format!(
            "k range {lo}..={hi} must lie within 2..={}",
            n.saturating_sub(1)
        )));
    }

    let steps: Vec<(usize, f64, f64)> = k_range
        .into_par_iter()
        .map(|k| -> Result<(usize, f64, f64)> {
            let (labels, objective) = match config.algorithm {
                SweepAlgorithm::KMeans => {
                    let p = kmeans(data, &KMeansConfig { k, ..config.kmeans })?;
                    (p.labels, p.objective)
                }
                SweepAlgorithm::Pam => {
                    let r = pam(dist, &PamConfig { k, ..config.pam })?;
                    (r.labels, r.cost)
                }
            };
            Ok((k, silhouette(dist, &labels)?.overall, objective))
        })
        .collect::<Result<_>>()?;

    let best_k = steps
        .iter()
        .fold((0, f64::NEG_INFINITY), |best, &(k, s, _)| {
            if s > best.1 {
                (k, s)
            } else {
                best
            }
        })
        .0;
    Ok(KSweepResult {
        algorithm: config.algorithm,
        ks: steps.iter().map(|s| s.0).collect(),
        avg_silhouette: steps.iter().map(|s| s.1).collect(),
        wss: steps.iter().map(|s| s.2).collect(),
        best_k,
    })
}
