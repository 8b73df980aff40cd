//! Minimal ARFF subset: numeric and nominal attributes, dense `@data` rows.

use std::fmt::Write as _;
use std::io::Read;

use super::{Cell, RawTable};
use crate::error::{Error, Result};

enum AttrKind {
    Numeric,
    Nominal(Vec<String>),
}

pub fn parse_arff<R: Read>(mut input: R) -> Result<RawTable> {
    let mut text = String::new();
    input
        .read_to_string(&mut text)
        .map_err(|e| Error::io("<input>", e))?;

    let mut relation_seen = false;
    let mut in_data = false;
    let mut names = Vec::new();
    let mut kinds = Vec::new();
    let mut rows = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if in_data {
            if line.starts_with('{') {
                return Err(syntax(lineno, "sparse data rows are not supported"));
            }
            let fields = split_fields(line, lineno)?;
            if fields.len() != names.len() {
                return Err(Error::MalformedRow {
                    line: lineno as u64,
                    expected: names.len(),
                    found: fields.len(),
                });
            }
            let row = fields
                .iter()
                .zip(&kinds)
                .enumerate()
                .map(|(column, (field, kind))| data_cell(field, kind, lineno, column))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
            continue;
        }

        let (keyword, rest) = split_keyword(line);
        match keyword.to_ascii_lowercase().as_str() {
            "@relation" => {
                if rest.is_empty() {
                    return Err(syntax(lineno, "@relation needs a name"));
                }
                relation_seen = true;
            }
            "@attribute" => {
                if !relation_seen {
                    return Err(syntax(lineno, "@attribute before @relation"));
                }
                let (name, type_spec) = take_token(rest, lineno)?;
                let type_spec = type_spec.trim();
                let kind = if type_spec.starts_with('{') {
                    let inner = type_spec
                        .strip_prefix('{')
                        .and_then(|s| s.strip_suffix('}'))
                        .ok_or_else(|| syntax(lineno, "unterminated nominal value list"))?;
                    AttrKind::Nominal(split_fields(inner, lineno)?)
                } else {
                    match type_spec.to_ascii_lowercase().as_str() {
                        "numeric" | "real" | "integer" => AttrKind::Numeric,
                        "" => return Err(syntax(lineno, "attribute type missing")),
                        _ => {
                            return Err(Error::UnsupportedAttributeType {
                                name,
                                kind: type_spec.to_string(),
                            })
                        }
                    }
                };
                names.push(name);
                kinds.push(kind);
            }
            "@data" => {
                if !relation_seen {
                    return Err(syntax(lineno, "@data before @relation"));
                }
                if names.is_empty() {
                    return Err(syntax(lineno, "@data without any @attribute"));
                }
                in_data = true;
            }
            _ => return Err(syntax(lineno, &format!("unexpected line {line:?}"))),
        }
    }

    if !relation_seen {
        return Err(syntax(0, "missing @relation"));
    }
    if !in_data {
        return Err(syntax(0, "missing @data section"));
    }
    RawTable::new(names, rows)
}

/// Serializes a table as ARFF with one numeric attribute per column.
pub fn write_arff(table: &RawTable, relation_name: &str) -> Vec<u8> {
    let mut out = String::new();
    let _ = writeln!(out, "@relation {}", quote(relation_name));
    out.push('\n');
    for name in table.column_names() {
        let _ = writeln!(out, "@attribute {} numeric", quote(name));
    }
    out.push_str("\n@data\n");
    for row in table.cells() {
        let line: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Number(v) => v.to_string(),
                Cell::Missing => "?".to_string(),
            })
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

fn syntax(line: usize, message: &str) -> Error {
    Error::ArffSyntax {
        line,
        message: message.to_string(),
    }
}

fn split_keyword(line: &str) -> (&str, &str) {
    match line.find(char::is_whitespace) {
        Some(i) => (&line[..i], line[i..].trim_start()),
        None => (line, ""),
    }
}

/// Reads one possibly quoted token; returns it unescaped plus the remainder.
fn take_token(s: &str, lineno: usize) -> Result<(String, &str)> {
    let s = s.trim_start();
    let mut chars = s.char_indices();
    match chars.next() {
        Some((_, q @ ('\'' | '"'))) => {
            let mut out = String::new();
            let mut escaped = false;
            for (i, c) in chars {
                if escaped {
                    out.push(c);
                    escaped = false;
                } else if c == '\\' {
                    escaped = true;
                } else if c == q {
                    return Ok((out, &s[i + 1..]));
                } else {
                    out.push(c);
                }
            }
            Err(syntax(lineno, "unterminated quoted name"))
        }
        Some(_) => {
            let end = s
                .find(|c: char| c.is_whitespace() || c == '{')
                .unwrap_or(s.len());
            Ok((s[..end].to_string(), &s[end..]))
        }
        None => Err(syntax(lineno, "expected a name")),
    }
}

/// Splits a comma-separated list, honouring quotes and backslash escapes.
fn split_fields(s: &str, lineno: usize) -> Result<Vec<String>> {
    let mut fields = Vec::new();
    let mut rest = s.trim();
    if rest.is_empty() {
        return Ok(fields);
    }
    loop {
        let (field, tail) = if rest.starts_with('\'') || rest.starts_with('"') {
            take_token(rest, lineno)?
        } else {
            let end = rest.find(',').unwrap_or(rest.len());
            (rest[..end].trim().to_string(), &rest[end..])
        };
        fields.push(field);
        let tail = tail.trim_start();
        if tail.is_empty() {
            break;
        }
        rest = tail
            .strip_prefix(',')
            .ok_or_else(|| syntax(lineno, "expected ',' between values"))?
            .trim_start();
    }
    Ok(fields)
}

fn data_cell(field: &str, kind: &AttrKind, lineno: usize, column: usize) -> Result<Cell> {
    if field == "?" {
        return Ok(Cell::Missing);
    }
    let bad = || Error::NonNumericCell {
        line: lineno as u64,
        column,
        value: field.to_string(),
    };
    match kind {
        AttrKind::Numeric => field.parse::<f64>().map(Cell::Number).map_err(|_| bad()),
        AttrKind::Nominal(values) => values
            .iter()
            .position(|v| v == field)
            .map(|i| Cell::Number(i as f64))
            .ok_or_else(bad),
    }
}

fn quote(name: &str) -> String {
    let plain = !name.is_empty()
        && !name.starts_with(['@', '?'])
        && !name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, ',' | '{' | '}' | '%' | '\'' | '"' | '\\'));
    if plain {
        return name.to_string();
    }
    let mut out = String::with_capacity(name.len() + 2);
    out.push('\'');
    for c in name.chars() {
        if c == '\'' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('\'');
    out
}
