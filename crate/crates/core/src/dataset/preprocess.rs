use serde::{Deserialize, Serialize};

use super::{Cell, ClassLabel, Dataset, RawTable, WBC_CLASS_COLUMN, WBC_ID_COLUMN};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormParam {
    pub column: String,
    pub min: f64,
    pub max: f64,
}

/// What preprocessing did to the table. `rows_before - rows_dropped == rows_after`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessReport {
    pub rows_before: usize,
    pub rows_after: usize,
    pub rows_dropped: usize,
    pub dropped_row_ids: Vec<String>,
    pub columns_dropped: Vec<String>,
    pub norm_params: Vec<NormParam>,
}

#[derive(Debug, Clone, Default)]
pub struct PreprocessOptions {
    pub id_column: Option<String>,
    pub label_column: Option<String>,
    pub normalize: bool,
}

/// Keeps rows with no missing cell, in order. Returns the original indices of
/// the rows that were removed.
pub fn drop_missing_rows(table: &RawTable) -> (RawTable, Vec<usize>) {
    let mut kept = Vec::with_capacity(table.n_rows());
    let mut dropped = Vec::new();
    for (i, row) in table.cells().iter().enumerate() {
        if row.iter().any(|c| c.is_missing()) {
            dropped.push(i);
        } else {
            kept.push(row.clone());
        }
    }
    let out = RawTable {
        column_names: table.column_names().to_vec(),
        cells: kept,
    };
    (out, dropped)
}

/// Separates id and label columns from the features and optionally min-max
/// scales every feature column using its observed extremes. Constant columns
/// scale to 0.
pub fn build_dataset(
    table: &RawTable,
    id_column: Option<&str>,
    label_column: Option<&str>,
    normalize: bool,
) -> Result<(Dataset, PreprocessReport)> {
    let id_idx = id_column.map(|c| table.column_index(c)).transpose()?;
    let label_idx = label_column.map(|c| table.column_index(c)).transpose()?;
    let feature_cols: Vec<usize> = (0..table.n_cols())
        .filter(|&j| Some(j) != id_idx && Some(j) != label_idx)
        .collect();

    let n = table.n_rows();
    let d = feature_cols.len();
    let mut features = Matrix::zeros(n, d);
    let mut row_ids = Vec::with_capacity(n);
    let mut labels = label_idx.map(|_| Vec::with_capacity(n));

    for (i, row) in table.cells().iter().enumerate() {
        let value = |j: usize| row[j].value().ok_or(Error::MissingValue { row: i });
        for (out_j, &j) in feature_cols.iter().enumerate() {
            features.set(i, out_j, value(j)?);
        }
        row_ids.push(match id_idx {
            Some(j) => format_id(value(j)?),
            None => (i + 1).to_string(),
        });
        if let (Some(j), Some(labels)) = (label_idx, labels.as_mut()) {
            let v = value(j)?;
            labels.push(
                ClassLabel::from_code(v).ok_or(Error::InvalidClassValue { row: i, value: v })?,
            );
        }
    }

    let feature_names: Vec<String> = feature_cols
        .iter()
        .map(|&j| table.column_names()[j].clone())
        .collect();

    let mut norm_params = Vec::new();
    if normalize {
        for (j, name) in feature_names.iter().enumerate() {
            let (min, max) = features
                .column(j)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v), hi.max(v))
                });
            let range = max - min;
            for i in 0..n {
                let scaled = if range > 0.0 {
                    (features.get(i, j) - min) / range
                } else {
                    0.0
                };
                features.set(i, j, scaled);
            }
            if n > 0 {
                norm_params.push(NormParam {
                    column: name.clone(),
                    min,
                    max,
                });
            }
        }
    }

    let columns_dropped = [id_idx, label_idx]
        .into_iter()
        .flatten()
        .map(|j| table.column_names()[j].clone())
        .collect();

    let mut dataset = Dataset::new(features, row_ids, labels, feature_names)?;
    dataset.normalized = normalize;
    let report = PreprocessReport {
        rows_before: n,
        rows_after: n,
        rows_dropped: 0,
        dropped_row_ids: Vec::new(),
        columns_dropped,
        norm_params,
    };
    Ok((dataset, report))
}

/// Full preprocessing: drop incomplete rows, then [`build_dataset`].
pub fn preprocess(
    table: &RawTable,
    opts: &PreprocessOptions,
) -> Result<(Dataset, PreprocessReport)> {
    let id_idx = opts
        .id_column
        .as_deref()
        .map(|c| table.column_index(c))
        .transpose()?;
    let (complete, dropped) = drop_missing_rows(table);
    let (dataset, mut report) = build_dataset(
        &complete,
        opts.id_column.as_deref(),
        opts.label_column.as_deref(),
        opts.normalize,
    )?;
    report.rows_before = table.n_rows();
    report.rows_dropped = dropped.len();
    report.dropped_row_ids = dropped
        .iter()
        .map(|&i| match id_idx.and_then(|j| table.row(i)[j].value()) {
            Some(v) => format_id(v),
            None => format!("row {}", i + 1),
        })
        .collect();
    Ok((dataset, report))
}

/// Rescales every feature column to zero mean and unit sample standard
/// deviation. Constant columns become 0. The result is not flagged normalized.
pub fn standardize(data: &Dataset) -> Dataset {
    let x = data.features();
    let (n, d) = (x.nrows(), x.ncols());
    let mut out = x.clone();
    for j in 0..d {
        let mean = x.column(j).sum::<f64>() / n as f64;
        let var = x.column(j).map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n.max(2) - 1) as f64;
        let sd = var.sqrt();
        for i in 0..n {
            out.set(
                i,
                j,
                if sd > 0.0 {
                    (x.get(i, j) - mean) / sd
                } else {
                    0.0
                },
            );
        }
    }
    Dataset {
        features: out,
        normalized: false,
        ..data.clone()
    }
}

impl Dataset {
    /// Table form of the dataset: id, features, then class code when labelled.
    /// Id and class columns use the breast-cancer names so a reload finds them.
    pub fn to_raw_table(&self) -> RawTable {
        let mut names = vec![WBC_ID_COLUMN.to_string()];
        names.extend(self.feature_names.iter().cloned());
        if self.labels.is_some() {
            names.push(WBC_CLASS_COLUMN.into());
        }
        let cells = (0..self.n_rows())
            .map(|i| {
                let mut row = vec![self.row_ids[i]
                    .parse::<f64>()
                    .map_or(Cell::Number((i + 1) as f64), Cell::Number)];
                row.extend(self.features.row(i).iter().map(|&v| Cell::Number(v)));
                if let Some(l) = &self.labels {
                    row.push(Cell::Number(f64::from(l[i].code())));
                }
                row
            })
            .collect();
        RawTable {
            column_names: names,
            cells,
        }
    }
}

fn format_id(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        v.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num(rows: &[&[f64]]) -> Vec<Vec<Cell>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| Cell::Number(v)).collect())
            .collect()
    }

    fn names(n: &[&str]) -> Vec<String> {
        n.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn no_missing_is_identity() {
        let t = RawTable::new(names(&["a", "b"]), num(&[&[1.0, 2.0], &[3.0, 4.0]])).unwrap();
        let (out, dropped) = drop_missing_rows(&t);
        assert_eq!(out, t);
        assert!(dropped.is_empty());
    }

    #[test]
    fn all_missing_drops_everything() {
        let t = RawTable::new(
            names(&["a", "b"]),
            vec![
                vec![Cell::Missing, Cell::Number(1.0)],
                vec![Cell::Number(1.0), Cell::Missing],
            ],
        )
        .unwrap();
        let (out, dropped) = drop_missing_rows(&t);
        assert_eq!(out.n_rows(), 0);
        assert_eq!(dropped, vec![0, 1]);
    }

    #[test]
    fn min_max_formula() {
        let t = RawTable::new(names(&["v"]), num(&[&[2.0], &[4.0], &[6.0]])).unwrap();
        let (ds, rep) = build_dataset(&t, None, None, true).unwrap();
        assert_eq!(ds.features().as_slice(), &[0.0, 0.5, 1.0]);
        assert_eq!(
            rep.norm_params,
            vec![NormParam {
                column: "v".into(),
                min: 2.0,
                max: 6.0
            }]
        );
        assert!(ds.is_normalized());
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let t = RawTable::new(names(&["c", "v"]), num(&[&[7.0, 1.0], &[7.0, 3.0]])).unwrap();
        let (ds, _) = build_dataset(&t, None, None, true).unwrap();
        assert_eq!(ds.features().as_slice(), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn id_and_label_split_off() {
        let t = RawTable::new(
            names(&["id", "x", "class"]),
            num(&[&[1000025.0, 5.0, 2.0], &[1002945.0, 3.0, 4.0]]),
        )
        .unwrap();
        let (ds, rep) = build_dataset(&t, Some("id"), Some("class"), false).unwrap();
        assert_eq!(ds.n_features(), 1);
        assert_eq!(ds.row_ids(), ["1000025", "1002945"]);
        assert_eq!(
            ds.labels().unwrap(),
            [ClassLabel::Benign, ClassLabel::Malignant]
        );
        assert_eq!(rep.columns_dropped, ["id", "class"]);
        assert!(!ds.is_normalized());
    }

    #[test]
    fn bad_class_and_unknown_column() {
        let t = RawTable::new(names(&["x", "class"]), num(&[&[1.0, 3.0]])).unwrap();
        assert!(matches!(
            build_dataset(&t, None, Some("class"), false),
            Err(Error::InvalidClassValue { row: 0, .. })
        ));
        assert!(matches!(
            build_dataset(&t, Some("nope"), None, false),
            Err(Error::UnknownColumn(_))
        ));
    }

    #[test]
    fn preprocess_counts_and_ids() {
        let t = RawTable::new(
            names(&["id", "x"]),
            vec![
                vec![Cell::Number(11.0), Cell::Number(1.0)],
                vec![Cell::Number(12.0), Cell::Missing],
                vec![Cell::Number(13.0), Cell::Number(3.0)],
            ],
        )
        .unwrap();
        let opts = PreprocessOptions {
            id_column: Some("id".into()),
            label_column: None,
            normalize: true,
        };
        let (ds, rep) = preprocess(&t, &opts).unwrap();
        assert_eq!(
            (rep.rows_before, rep.rows_after, rep.rows_dropped),
            (3, 2, 1)
        );
        assert_eq!(rep.dropped_row_ids, ["12"]);
        assert_eq!(ds.row_ids(), ["11", "13"]);
    }

    #[test]
    fn standardize_unit_variance() {
        let t = RawTable::new(names(&["v"]), num(&[&[1.0], &[2.0], &[3.0]])).unwrap();
        let (ds, _) = build_dataset(&t, None, None, false).unwrap();
        let z = standardize(&ds);
        assert_eq!(z.features().as_slice(), &[-1.0, 0.0, 1.0]);
    }
}
