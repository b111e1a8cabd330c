//! Flat `key = value` text format shared by instance and experiment files.
//!
//! One entry per line, `#` starts a comment. A key with an empty value opens a
//! block: each following line without `=` is one row of comma-separated values.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: Value,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(String),
    Rows(Vec<(usize, String)>),
}

pub fn parse(text: &str) -> Result<Vec<Entry>> {
    let mut entries: Vec<Entry> = Vec::new();
    let mut open_block = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once('=') {
            Some((key, value)) => {
                let key = key.trim();
                if key.is_empty() {
                    return Err(Error::parse(line_no, "missing key before '='"));
                }
                if entries.iter().any(|e| e.key == key) {
                    return Err(Error::parse(line_no, format!("duplicate key `{key}`")));
                }
                let value = value.trim();
                open_block = value.is_empty();
                entries.push(Entry {
                    key: key.to_string(),
                    value: if open_block {
                        Value::Rows(Vec::new())
                    } else {
                        Value::Scalar(value.to_string())
                    },
                    line: line_no,
                });
            }
            None => {
                let Some(Entry {
                    value: Value::Rows(rows),
                    ..
                }) = entries.last_mut().filter(|_| open_block)
                else {
                    return Err(Error::parse(
                        line_no,
                        format!("expected `key = value`, found `{line}`"),
                    ));
                };
                rows.push((line_no, line.to_string()));
            }
        }
    }
    Ok(entries)
}

pub fn scalar(entry: &Entry) -> Result<&str> {
    match &entry.value {
        Value::Scalar(s) => Ok(s),
        Value::Rows(_) => Err(Error::parse(
            entry.line,
            format!("`{}` expects a single value, found a block", entry.key),
        )),
    }
}

pub fn parse_f64(entry: &Entry, text: &str, line: usize) -> Result<f64> {
    text.trim().parse::<f64>().map_err(|_| {
        Error::parse(
            line,
            format!("`{}`: `{}` is not a number", entry.key, text.trim()),
        )
    })
}

pub fn f64_value(entry: &Entry) -> Result<f64> {
    parse_f64(entry, scalar(entry)?, entry.line)
}

pub fn usize_value(entry: &Entry) -> Result<usize> {
    let s = scalar(entry)?;
    s.parse::<usize>().map_err(|_| {
        Error::parse(
            entry.line,
            format!("`{}`: `{s}` is not a nonnegative integer", entry.key),
        )
    })
}

fn split_list(entry: &Entry, text: &str, line: usize) -> Result<Vec<f64>> {
    text.split(',').map(|t| parse_f64(entry, t, line)).collect()
}

pub fn vector(entry: &Entry) -> Result<Vec<f64>> {
    split_list(entry, scalar(entry)?, entry.line)
}

pub fn matrix(entry: &Entry) -> Result<Vec<Vec<f64>>> {
    match &entry.value {
        Value::Rows(rows) if !rows.is_empty() => rows
            .iter()
            .map(|(line, text)| split_list(entry, text, *line))
            .collect(),
        Value::Rows(_) => Err(Error::parse(
            entry.line,
            format!("`{}` block has no rows", entry.key),
        )),
        Value::Scalar(_) => Err(Error::parse(
            entry.line,
            format!(
                "`{}` expects a block of rows on the following lines",
                entry.key
            ),
        )),
    }
}

pub fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}
