//! Tabular ingestion and preprocessing.
//!
//! The flow for the Wisconsin breast-cancer file is
//! [`parse_csv`] → [`drop_missing_rows`] → [`build_dataset`], which removes the
//! sample-id column, separates the class column and min-max scales the nine
//! cytology features onto `[0, 1]`. [`preprocess`] runs all three and fills in
//! a complete [`PreprocessReport`].

mod arff;
mod delimited;
mod preprocess;

pub use arff::{parse_arff, write_arff};
pub use delimited::{parse_csv, write_csv, CsvConfig};
pub use preprocess::{
    build_dataset, drop_missing_rows, preprocess, standardize, NormParam, PreprocessOptions,
    PreprocessReport,
};

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Column names of the original Wisconsin breast-cancer file, which ships without a header.
pub const WBC_COLUMNS: [&str; 11] = [
    "Sample code number",
    "Clump Thickness",
    "Uniformity of Cell Size",
    "Uniformity of Cell Shape",
    "Marginal Adhesion",
    "Single Epithelial Cell Size",
    "Bare Nuclei",
    "Bland Chromatin",
    "Normal Nucleoli",
    "Mitoses",
    "Class",
];
pub const WBC_ID_COLUMN: &str = WBC_COLUMNS[0];
pub const WBC_CLASS_COLUMN: &str = WBC_COLUMNS[10];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Number(f64),
    Missing,
}

impl Cell {
    pub fn value(self) -> Option<f64> {
        match self {
            Cell::Number(v) => Some(v),
            Cell::Missing => None,
        }
    }

    pub fn is_missing(self) -> bool {
        matches!(self, Cell::Missing)
    }
}

/// Parsed but otherwise untouched table. Every row has exactly `n_cols` cells.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    column_names: Vec<String>,
    cells: Vec<Vec<Cell>>,
}

impl RawTable {
    pub fn new(column_names: Vec<String>, cells: Vec<Vec<Cell>>) -> Result<Self> {
        let mut seen = HashSet::new();
        for name in &column_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateColumn(name.clone()));
            }
        }
        for (i, row) in cells.iter().enumerate() {
            if row.len() != column_names.len() {
                return Err(Error::MalformedRow {
                    line: i as u64 + 1,
                    expected: column_names.len(),
                    found: row.len(),
                });
            }
        }
        Ok(RawTable {
            column_names,
            cells,
        })
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn cells(&self) -> &[Vec<Cell>] {
        &self.cells
    }

    pub fn row(&self, i: usize) -> &[Cell] {
        &self.cells[i]
    }

    pub fn n_rows(&self) -> usize {
        self.cells.len()
    }

    pub fn n_cols(&self) -> usize {
        self.column_names.len()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.column_names
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    /// Number of missing cells per column.
    pub fn missing_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_cols()];
        for row in &self.cells {
            for (c, cell) in counts.iter_mut().zip(row) {
                *c += usize::from(cell.is_missing());
            }
        }
        counts
    }

    /// Replaces the column names, keeping the cells.
    pub fn with_column_names(self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_cols() {
            return Err(Error::DimensionMismatch {
                left: self.n_cols(),
                right: names.len(),
            });
        }
        RawTable::new(names, self.cells)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassLabel {
    Benign,
    Malignant,
}

impl ClassLabel {
    /// Maps the file encoding (2 = benign, 4 = malignant).
    pub fn from_code(v: f64) -> Option<Self> {
        if v == 2.0 {
            Some(ClassLabel::Benign)
        } else if v == 4.0 {
            Some(ClassLabel::Malignant)
        } else {
            None
        }
    }

    pub fn code(self) -> u8 {
        match self {
            ClassLabel::Benign => 2,
            ClassLabel::Malignant => 4,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassLabel::Benign => "Benign",
            ClassLabel::Malignant => "Malignant",
        })
    }
}

/// Analysis-ready feature matrix. Contains no missing values; class labels are
/// kept alongside but never enter the feature columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Matrix,
    row_ids: Vec<String>,
    labels: Option<Vec<ClassLabel>>,
    feature_names: Vec<String>,
    normalized: bool,
}

impl Dataset {
    pub fn new(
        features: Matrix,
        row_ids: Vec<String>,
        labels: Option<Vec<ClassLabel>>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let n = features.nrows();
        if row_ids.len() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: row_ids.len(),
            });
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: l.len(),
                });
            }
        }
        if feature_names.len() != features.ncols() {
            return Err(Error::DimensionMismatch {
                left: features.ncols(),
                right: feature_names.len(),
            });
        }
        if let Some(pos) = features.as_slice().iter().position(|v| v.is_nan()) {
            return Err(Error::MissingValue {
                row: pos / features.ncols().max(1),
            });
        }
        Ok(Dataset {
            features,
            row_ids,
            labels,
            feature_names,
            normalized: false,
        })
    }

    /// Unlabelled dataset with positional row ids and generic feature names.
    pub fn from_matrix(features: Matrix) -> Result<Self> {
        let ids = (1..=features.nrows()).map(|i| i.to_string()).collect();
        let names = (1..=features.ncols()).map(|j| format!("x{j}")).collect();
        Dataset::new(features, ids, None, names)
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn labels(&self) -> Option<&[ClassLabel]> {
        self.labels.as_deref()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn n_rows(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    /// (benign, malignant) counts, when labels are present.
    pub fn class_counts(&self) -> Option<(usize, usize)> {
        self.labels.as_ref().map(|l| {
            let benign = l.iter().filter(|&&c| c == ClassLabel::Benign).count();
            (benign, l.len() - benign)
        })
    }
}
