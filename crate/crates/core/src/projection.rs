//! Two-dimensional PCA used for the cluster scatter plots.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection2D {
    /// n × 2 scores on the first two principal axes.
    pub coords: Matrix,
    /// Fraction of total variance carried by each axis.
    pub axis_variance: [f64; 2],
    /// Unit-norm loading vectors, one per axis.
    pub components: [Vec<f64>; 2],
    /// All covariance eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    pub total_variance: f64,
    pub mean: Vec<f64>,
    /// Zero total variance; coordinates are all zero.
    pub degenerate: bool,
}

impl Projection2D {
    /// Projects an arbitrary point (e.g. a centroid) onto the plane.
    pub fn project(&self, point: &[f64]) -> (f64, f64) {
        let dot = |c: &[f64]| {
            point
                .iter()
                .zip(&self.mean)
                .zip(c)
                .fold(0.0, |acc, ((x, m), w)| acc + (x - m) * w)
        };
        (dot(&self.components[0]), dot(&self.components[1]))
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching eigenvectors as the
/// rows of the returned matrix.
pub fn symmetric_eigen(a: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let d = a.nrows();
    if a.ncols() != d {
        return Err(Error::DimensionMismatch {
            left: d,
            right: a.ncols(),
        });
    }
    let mut m = a.clone();
    let mut v = Matrix::zeros(d, d);
    for i in 0..d {
        v.set(i, i, 1.0);
    }

    for _sweep in 0..100 {
        let off: f64 = (0..d)
            .flat_map(|p| ((p + 1)..d).map(move |q| (p, q)))
            .map(|(p, q)| m.get(p, q) * m.get(p, q))
            .sum();
        let scale: f64 = (0..d).map(|i| m.get(i, i) * m.get(i, i)).sum::<f64>() + off;
        if off <= f64::EPSILON * f64::EPSILON * scale || off == 0.0 {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..d {
                    let akp = m.get(k, p);
                    let akq = m.get(k, q);
                    m.set(k, p, c * akp - s * akq);
                    m.set(k, q, s * akp + c * akq);
                }
                for k in 0..d {
                    let apk = m.get(p, k);
                    let aqk = m.get(q, k);
                    m.set(p, k, c * apk - s * aqk);
                    m.set(q, k, s * apk + c * aqk);
                }
                m.set(p, q, 0.0);
                m.set(q, p, 0.0);
                for k in 0..d {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| m.get(j, j).total_cmp(&m.get(i, i)).then(i.cmp(&j)));
    let values = order.iter().map(|&i| m.get(i, i)).collect();
    let mut vectors = Matrix::zeros(d, d);
    for (r, &i) in order.iter().enumerate() {
        for k in 0..d {
            vectors.set(r, k, v.get(k, i));
        }
    }
    Ok((values, vectors))
}

/// Sample covariance (divisor n − 1) of the columns, plus the column means.
pub fn covariance(data: &Matrix) -> (Matrix, Vec<f64>) {
    let (n, d) = (data.nrows(), data.ncols());
    let mean: Vec<f64> = (0..d)
        .map(|j| data.column(j).sum::<f64>() / n as f64)
        .collect();
    let mut cov = Matrix::zeros(d, d);
    for p in 0..d {
        for q in p..d {
            let s = data
                .rows()
                .fold(0.0, |acc, r| acc + (r[p] - mean[p]) * (r[q] - mean[q]));
            let c = s / (n as f64 - 1.0);
            cov.set(p, q, c);
            cov.set(q, p, c);
        }
    }
    (cov, mean)
}

/// Flips `v` so its largest-magnitude entry (first on ties) is positive.
fn orient(v: &mut [f64]) {
    let mut idx = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[idx].abs() {
            idx = i;
        }
    }
    if v[idx] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

pub fn pca_2d(data: &Matrix) -> Result<Projection2D> {
    let (n, d) = (data.nrows(), data.ncols());
    if n < 2 {
        return Err(Error::TooFewPoints { n, k: 2 });
    }
    if d < 2 {
        return Err(Error::InvalidConfig(
            "PCA projection needs at least two features".into(),
        ));
    }
    let (cov, mean) = covariance(data);
    let total_variance: f64 = (0..d).map(|i| cov.get(i, i)).sum();

    if total_variance <= 0.0 {
        let mut e0 = vec![0.0; d];
        let mut e1 = vec![0.0; d];
        e0[0] = 1.0;
        e1[1] = 1.0;
        return Ok(Projection2D {
            coords: Matrix::zeros(n, 2),
            axis_variance: [0.0, 0.0],
            components: [e0, e1],
            eigenvalues: vec![0.0; d],
            total_variance: 0.0,
            mean,
            degenerate: true,
        });
    }

    let (eigenvalues, vectors) = symmetric_eigen(&cov)?;
    let mut c0 = vectors.row(0).to_vec();
    let mut c1 = vectors.row(1).to_vec();
    orient(&mut c0);
    orient(&mut c1);

    let mut proj = Projection2D {
        coords: Matrix::zeros(n, 2),
        axis_variance: [
            (eigenvalues[0] / total_variance).clamp(0.0, 1.0),
            (eigenvalues[1] / total_variance).clamp(0.0, 1.0),
        ],
        components: [c0, c1],
        eigenvalues,
        total_variance,
        mean,
        degenerate: false,
    };
    for i in 0..n {
        let (x, y) = proj.project(data.row(i));
        proj.coords.set(i, 0, x);
        proj.coords.set(i, 1, y);
    }
    Ok(proj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix_eigen() {
        let a = Matrix::from_rows(&[[1.0, 0.0], [0.0, 3.0]]).unwrap();
        let (vals, vecs) = symmetric_eigen(&a).unwrap();
        assert_eq!(vals, vec![3.0, 1.0]);
        assert_eq!(vecs.row(0)[1].abs(), 1.0);
    }

    #[test]
    fn known_2x2() {
        // Eigenvalues of [[2,1],[1,2]] are 3 and 1.
        let a = Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let (vals, vecs) = symmetric_eigen(&a).unwrap();
        assert!((vals[0] - 3.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        let r = vecs.row(0);
        assert!((r[0].abs() - r[1].abs()).abs() < 1e-14);
    }

    #[test]
    fn points_on_x_axis() {
        let x = Matrix::from_rows(&[[-2.0, 0.0], [0.0, 0.0], [1.0, 0.0], [5.0, 0.0]]).unwrap();
        let p = pca_2d(&x).unwrap();
        assert_eq!(p.components[0], vec![1.0, 0.0]);
        assert!(p.coords.column(1).all(|y| y == 0.0));
        assert_eq!(p.axis_variance, [1.0, 0.0]);
    }

    #[test]
    fn identical_points_degenerate() {
        let x = Matrix::from_rows(&[[1.0, 2.0, 3.0]; 4]).unwrap();
        let p = pca_2d(&x).unwrap();
        assert!(p.degenerate);
        assert!(p.coords.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn too_small() {
        assert!(pca_2d(&Matrix::from_rows(&[[1.0, 2.0]]).unwrap()).is_err());
        assert!(pca_2d(&Matrix::from_rows(&[[1.0], [2.0]]).unwrap()).is_err());
    }
}
