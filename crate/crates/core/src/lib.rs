//! Clustering analysis for small dense tabular datasets.
//!
//! The crate covers the whole unsupervised workflow used on the Wisconsin
//! breast-cancer data:
//!
//! * [`dataset`]: CSV / ARFF ingestion, missing-row removal, min-max scaling
//! * [`tendency`]: Hopkins statistic
//! * [`kmeans`]: Lloyd's algorithm with k-means++ seeding and restarts
//! * [`pam`]: Partitioning Around Medoids (BUILD + SWAP)
//! * [`validation`]: silhouette widths and the k sweep
//! * [`projection`]: 2-D PCA for plotting
//! * [`report`], [`plot`], [`pipeline`]: JSON / Markdown reports, SVG charts
//!   and the end-to-end driver
//!
//! ```
//! use clusterlab::{kmeans, KMeansConfig, Matrix};
//!
//! let x = Matrix::from_rows(&[[0.0], [1.0], [2.0], [10.0], [11.0], [12.0]]).unwrap();
//! let p = kmeans(&x, &KMeansConfig::new(2)).unwrap();
//! assert_eq!(p.objective, 4.0);
//! ```

pub mod dataset;
pub mod error;
pub mod kmeans;
pub mod matrix;
pub mod metrics;
pub mod pam;
pub mod pipeline;
pub mod plot;
pub mod projection;
pub mod report;
pub mod tendency;
pub mod validation;

pub use dataset::{ClassLabel, Dataset, RawTable};
pub use error::{Error, Result};
pub use kmeans::{kmeans, wss, KMeansConfig, KMeansInit, Partition};
pub use matrix::Matrix;
pub use metrics::{distance, pairwise, DistanceMatrix, Metric};
pub use pam::{pam, pam_cost, PamConfig, PamResult};
pub use projection::{pca_2d, Projection2D};
pub use report::{AnalysisReport, ReportFormat};
pub use tendency::{hopkins, HopkinsConfig, HopkinsResult};
pub use validation::{
    silhouette, sweep_k, KSweepResult, SilhouetteReport, SweepAlgorithm, SweepConfig,
};
