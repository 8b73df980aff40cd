use std::io::Read;

use super::{Cell, RawTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CsvConfig {
    pub has_header: bool,
    pub delimiter: u8,
    pub missing_marker: String,
    /// Names to use when the file has no header. Defaults to `col1..colN`.
    pub column_names: Option<Vec<String>>,
}

impl Default for CsvConfig {
    fn default() -> Self {
        CsvConfig {
            has_header: false,
            delimiter: b',',
            missing_marker: "?".to_string(),
            column_names: None,
        }
    }
}

/// Parses delimiter-separated numeric text. Cells equal to the missing marker
/// (after trimming) become [`Cell::Missing`]; everything else must parse as `f64`.
pub fn parse_csv<R: Read>(input: R, config: &CsvConfig) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(config.has_header)
        .delimiter(config.delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);

    let mut names: Option<Vec<String>> = if config.has_header {
        let header = reader.headers().map_err(csv_error)?;
        if header.is_empty() {
            None
        } else {
            Some(header.iter().map(str::to_string).collect())
        }
    } else {
        config.column_names.clone()
    };

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let width = names
            .get_or_insert_with(|| (1..=record.len()).map(|j| format!("col{j}")).collect())
            .len();
        if record.len() != width {
            return Err(Error::MalformedRow {
                line,
                expected: width,
                found: record.len(),
            });
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(column, field)| parse_cell(field, &config.missing_marker, line, column))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    RawTable::new(names.unwrap_or_default(), rows)
}

fn parse_cell(field: &str, missing: &str, line: u64, column: usize) -> Result<Cell> {
    if field == missing {
        return Ok(Cell::Missing);
    }
    field
        .parse::<f64>()
        .map(Cell::Number)
        .map_err(|_| Error::NonNumericCell {
            line,
            column,
            value: field.to_string(),
        })
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: "<input>".into(),
            source,
        },
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => Error::MalformedRow {
            line,
            expected: expected_len as usize,
            found: len as usize,
        },
        other => Error::NonNumericCell {
            line,
            column: 0,
            value: format!("{other:?}"),
        },
    }
}

/// Writes a table as CSV with a header row. Missing cells use `missing_marker`.
pub fn write_csv(table: &RawTable, delimiter: u8, missing_marker: &str) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(Vec::new());
    // Writing into a Vec cannot fail.
    w.write_record(table.column_names())
        .expect("in-memory write");
    for row in table.cells() {
        let fields: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Number(v) => v.to_string(),
                Cell::Missing => missing_marker.to_string(),
            })
            .collect();
        w.write_record(&fields).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}
