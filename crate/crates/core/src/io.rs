// SPDX-License-Identifier: MIT OR Apache-2.0

//! Reading series from delimited text and writing plot data.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{CpError, Result};
use crate::kernel::TimeSeries;
use crate::search::DetectionResult;

/// Which column of a delimited file holds the series.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum ColumnSelector {
    /// Zero-based position.
    #[default]
    First,
    Index(usize),
    /// Header name; requires a header row.
    Name(String),
}

impl std::str::FromStr for ColumnSelector {
    type Err = std::convert::Infallible;

    /// Digits select by position, anything else by header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.trim().parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(s.trim().to_string()),
        })
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CpError {
    CpError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    }
}

fn parse_err(path: &Path, line: usize, reason: impl Into<String>) -> CpError {
    CpError::Parse {
        path: path.display().to_string(),
        line,
        reason: reason.into(),
    }
}

/// Reads one numeric column of a comma-separated file, in file order.
///
/// A first row whose selected cell is not a number is taken as a header.
/// Blank lines are skipped. Any other non-numeric or missing cell is an
/// error naming its line.
pub fn ingest_csv(path: impl AsRef<Path>, column: &ColumnSelector) -> Result<TimeSeries> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(file);

    let mut index = match column {
        ColumnSelector::First => Some(0),
        ColumnSelector::Index(i) => Some(*i),
        ColumnSelector::Name(_) => None,
    };
    let mut values = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if first {
            first = false;
            if let ColumnSelector::Name(name) = column {
                let pos = record.iter().position(|h| h == name).ok_or_else(|| {
                    parse_err(path, line, format!("no column named `{name}` in header"))
                })?;
                index = Some(pos);
                continue;
            }
            let cell = record.get(index.unwrap_or(0)).unwrap_or("");
            if cell.parse::<f64>().is_err() {
                continue;
            }
        }
        let i = index.unwrap_or(0);
        let cell = record
            .get(i)
            .ok_or_else(|| parse_err(path, line, format!("missing column {i}")))?;
        let value: f64 = cell
            .parse()
            .map_err(|_| parse_err(path, line, format!("non-numeric value `{cell}`")))?;
        if !value.is_finite() {
            return Err(parse_err(path, line, format!("non-finite value `{cell}`")));
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(parse_err(path, 0, "file contains no data"));
    }
    TimeSeries::new(values)
}

/// Writes `t,y,interval_id,eta_flag` rows for external plotting.
///
/// `interval_id` is the 1-based position of the interval containing `t`,
/// or 0; `eta_flag` is 1 at each localised change point.
pub fn write_plot_data(
    path: impl AsRef<Path>,
    ts: &TimeSeries,
    result: &DetectionResult,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = BufWriter::new(file);
    write_plot_rows(&mut out, ts, result).map_err(|e| io_err(path, e))?;
    out.flush().map_err(|e| io_err(path, e))
}

pub(crate) fn write_plot_rows(
    out: &mut impl Write,
    ts: &TimeSeries,
    result: &DetectionResult,
) -> std::io::Result<()> {
    let mut id = vec![0usize; ts.len() + 1];
    let mut eta = vec![false; ts.len() + 1];
    for (k, iv) in result.intervals.iter().enumerate() {
        for t in iv.start..=iv.end.min(ts.len()) {
            id[t] = k + 1;
        }
        if iv.eta_hat <= ts.len() {
            eta[iv.eta_hat] = true;
        }
    }
    writeln!(out, "t,y,interval_id,eta_flag")?;
    for (t, y) in ts.values().iter().enumerate().map(|(i, y)| (i + 1, y)) {
        writeln!(out, "{t},{y},{},{}", id[t], u8::from(eta[t]))?;
    }
    Ok(())
}
