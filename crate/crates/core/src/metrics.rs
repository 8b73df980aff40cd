//! Distance kernels and the condensed pairwise distance matrix.
//!
//! Per-entry arithmetic runs left to right over coordinates, so a
//! [`DistanceMatrix`] is bit-identical to a naive double loop no matter how
//! many threads built it.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// `SquaredEuclidean` is not a metric in the strict sense: it violates the
/// triangle inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Euclidean,
    SquaredEuclidean,
    Manhattan,
}

impl Metric {
    /// Distance without the length check.
    #[inline]
    pub fn eval(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => squared_euclidean(a, b).sqrt(),
            Metric::SquaredEuclidean => squared_euclidean(a, b),
            Metric::Manhattan => a.iter().zip(b).fold(0.0, |acc, (x, y)| acc + (x - y).abs()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::SquaredEuclidean => "squared_euclidean",
            Metric::Manhattan => "manhattan",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "euclidean" => Ok(Metric::Euclidean),
            "squared_euclidean" | "sqeuclidean" => Ok(Metric::SquaredEuclidean),
            "manhattan" | "cityblock" => Ok(Metric::Manhattan),
            other => Err(Error::InvalidConfig(format!("unknown metric {other:?}"))),
        }
    }
}

#[inline]
pub(crate) fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| {
        let d = x - y;
        acc + d * d
    })
}

pub fn distance(a: &[f64], b: &[f64], metric: Metric) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(metric.eval(a, b))
}

/// Position of pair `(i, j)`, `i < j`, in the condensed upper triangle of an
/// `n`-point matrix.
#[inline]
pub fn condensed_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Symmetric pairwise distances stored once per pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    metric: Metric,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Wraps precomputed condensed values. They must number `n(n-1)/2` and be
    /// non-negative.
    pub fn from_condensed(n: usize, metric: Metric, values: Vec<f64>) -> Result<Self> {
        let expected = n * n.saturating_sub(1) / 2;
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                left: expected,
                right: values.len(),
            });
        }
        if values.iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(Error::InvalidConfig(
                "distances must be non-negative".into(),
            ));
        }
        Ok(DistanceMatrix { n, metric, values })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.values[condensed_index(self.n, i, j)],
            std::cmp::Ordering::Greater => self.values[condensed_index(self.n, j, i)],
            std::cmp::Ordering::Equal => 0.0,
        }
    }

    /// Every distance multiplied by `factor` (> 0).
    pub fn scaled(&self, factor: f64) -> DistanceMatrix {
        DistanceMatrix {
            n: self.n,
            metric: self.metric,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

/// All pairwise distances between the rows of `data`.
pub fn pairwise(data: &Matrix, metric: Metric) -> DistanceMatrix {
    let n = data.nrows();
    let values = (0..n)
        .into_par_iter()
        .map(|i| {
            let a = data.row(i);
            ((i + 1)..n)
                .map(|j| metric.eval(a, data.row(j)))
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .concat();
    DistanceMatrix { n, metric, values }
}

/// Closest row to `query`, skipping `exclude`. Ties go to the lowest index.
pub fn nearest_neighbor(
    query: &[f64],
    data: &Matrix,
    exclude: Option<usize>,
    metric: Metric,
) -> Result<(usize, f64)> {
    if data.nrows() > 0 && query.len() != data.ncols() {
        return Err(Error::DimensionMismatch {
            left: query.len(),
            right: data.ncols(),
        });
    }
    let mut best: Option<(usize, f64)> = None;
    for (i, row) in data.rows().enumerate() {
        if Some(i) == exclude {
            continue;
        }
        let d = metric.eval(query, row);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    best.ok_or(Error::EmptyCandidateSet)
}
