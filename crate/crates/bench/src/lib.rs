//! Fixtures shared by the benchmarks.

use std::path::PathBuf;

use clusterlab::pipeline::{load_dataset, InputOptions};
use clusterlab::Dataset;

pub fn wbc_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/breast-cancer-wisconsin.data")
}

/// The breast-cancer table after dropping incomplete rows and min-max scaling.
pub fn wbc() -> Dataset {
    load_dataset(&wbc_path(), &InputOptions::default())
        .expect("bundled data set loads")
        .1
}
