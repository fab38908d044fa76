//! Headed CSV table reading with row locations for error messages.

use std::fs::File;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Location, Result};

/// A data row with its 1-based line number and the file it came from.
pub(crate) struct Row<'a> {
    file: &'a str,
    line: u64,
    record: csv::StringRecord,
    header: &'a [&'a str],
}

impl Row<'_> {
    pub(crate) fn location(&self) -> Location {
        Location::new(self.file, self.line)
    }

    pub(crate) fn get(&self, column: &str) -> &str {
        let idx = self
            .header
            .iter()
            .position(|h| *h == column)
            .expect("column declared in header");
        self.record.get(idx).unwrap_or("")
    }

    pub(crate) fn required(&self, column: &str) -> Result<&str> {
        let value = self.get(column).trim();
        if value.is_empty() {
            return Err(Error::malformed(
                self.location(),
                column,
                "value is required",
            ));
        }
        Ok(value)
    }

    pub(crate) fn parse<T: FromStr>(&self, column: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.required(column)?;
        raw.parse::<T>().map_err(|e| {
            Error::malformed(
                self.location(),
                column,
                format!("cannot parse `{raw}`: {e}"),
            )
        })
    }
}

/// Reads every row of a headed CSV file. The header must equal `header`
/// exactly; a zero-byte file is read as an empty table.
pub(crate) fn read_table<'a>(
    path: &Path,
    file: &'a str,
    header: &'a [&'a str],
) -> Result<Vec<Row<'a>>> {
    let handle = File::open(path).map_err(|e| Error::io(path, e))?;
    read_table_from(handle, path, file, header, header.len())
}

pub(crate) fn read_table_from<'a, R: std::io::Read>(
    reader: R,
    path: &Path,
    file: &'a str,
    header: &'a [&'a str],
    required_columns: usize,
) -> Result<Vec<Row<'a>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = reader.records();
    let csv_err = |source: csv::Error| Error::Csv {
        path: path.to_path_buf(),
        source,
    };

    let Some(first) = records.next() else {
        return Ok(Vec::new());
    };
    let first = first.map_err(csv_err)?;
    let found: Vec<&str> = first.iter().map(str::trim).collect();
    let matches = found.len() >= required_columns
        && found.len() <= header.len()
        && found.iter().zip(header.iter()).all(|(a, b)| a == b);
    if !matches {
        return Err(Error::malformed(
            Location::new(file, 1),
            "<header>",
            format!(
                "expected `{}`, found `{}`",
                header[..required_columns].join(","),
                found.join(",")
            ),
        ));
    }

    let mut rows = Vec::new();
    for record in records {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record.get(0).is_some_and(|v| v.trim().is_empty()) {
            continue;
        }
        if record.len() != found.len() {
            return Err(Error::malformed(
                Location::new(file, line),
                "<row>",
                format!("expected {} columns, found {}", found.len(), record.len()),
            ));
        }
        rows.push(Row {
            file,
            line,
            record,
            header,
        });
    }
    Ok(rows)
}
