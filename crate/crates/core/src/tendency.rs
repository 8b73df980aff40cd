//! Hopkins statistic.
//!
//! Orientation: values near 1 mean clustered data, about 0.5 means spatially
//! uniform data. The synthetic-point distance sum is the numerator.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::metrics::{nearest_neighbor, Metric};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopkinsConfig {
    /// Sample size; `None` picks `floor(0.1 n)`.
    pub m: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Raise distances to the data dimension before summing.
    pub power_d: bool,
}

impl Default for HopkinsConfig {
    fn default() -> Self {
        HopkinsConfig {
            m: None,
            trials: 30,
            seed: 42,
            power_d: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopkinsResult {
    /// Mean of `per_trial`.
    pub h: f64,
    pub m: usize,
    pub trials: usize,
    pub per_trial: Vec<f64>,
    pub std_dev: f64,
    pub seed: u64,
    pub exponent: u32,
    /// Set when every data point is identical; `h` is then 1 by convention.
    pub degenerate: bool,
}

/// Default sample size: ten percent of the rows, rounded down, at least 1.
pub fn default_sample_size(n: usize) -> usize {
    (n / 10).clamp(1, n.saturating_sub(1).max(1))
}

pub fn hopkins(data: &Matrix, config: &HopkinsConfig) -> Result<HopkinsResult> {
    let n = data.nrows();
    if n < 2 {
        return Err(Error::TooFewPoints { n, k: 2 });
    }
    let m = config.m.unwrap_or_else(|| default_sample_size(n));
    if m == 0 {
        return Err(Error::InvalidConfig(
            "sample size must be at least 1".into(),
        ));
    }
    if m > n - 1 {
        return Err(Error::SampleTooLarge { m, max: n - 1 });
    }
    if config.trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }

    let d = data.ncols();
    let (lo, hi) = bounding_box(data);
    let degenerate = (1..n).all(|i| data.row(i) == data.row(0));
    let exponent = if config.power_d { d as u32 } else { 1 };

    let per_trial: Vec<f64> = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| {
            if degenerate {
                return 1.0;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(t));
            let lift = |x: f64| x.powi(exponent as i32);

            let mut synthetic = vec![0.0; d];
            let mut u_sum = 0.0;
            for _ in 0..m {
                for (k, s) in synthetic.iter_mut().enumerate() {
                    *s = lo[k] + (hi[k] - lo[k]) * rng.gen::<f64>();
                }
                let (_, dist) =
                    nearest_neighbor(&synthetic, data, None, Metric::Euclidean).expect("n >= 2");
                u_sum += lift(dist);
            }

            let mut w_sum = 0.0;
            for i in index::sample(&mut rng, n, m).into_iter() {
                let (_, dist) = nearest_neighbor(data.row(i), data, Some(i), Metric::Euclidean)
                    .expect("n >= 2");
                w_sum += lift(dist);
            }

            let total = u_sum + w_sum;
            if total > 0.0 {
                u_sum / total
            } else {
                0.5
            }
        })
        .collect();

    let h = per_trial.iter().sum::<f64>() / per_trial.len() as f64;
    let std_dev = if per_trial.len() > 1 {
        (per_trial.iter().map(|v| (v - h) * (v - h)).sum::<f64>() / (per_trial.len() - 1) as f64)
            .sqrt()
    } else {
        0.0
    };
    Ok(HopkinsResult {
        h,
        m,
        trials: config.trials,
        per_trial,
        std_dev,
        seed: config.seed,
        exponent,
        degenerate,
    })
}

fn bounding_box(data: &Matrix) -> (Vec<f64>, Vec<f64>) {
    let d = data.ncols();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for row in data.rows() {
        for k in 0..d {
            lo[k] = lo[k].min(row[k]);
            hi[k] = hi[k].max(row[k]);
        }
    }
    (lo, hi)
}
