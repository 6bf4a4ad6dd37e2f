//! Time-series CSV files.
//!
//! Layout: a header row, a first column `t_sec` with a uniform step, then one
//! column per named signal. Values are written in shortest round-trip form so
//! a write/read cycle is exact.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::TimeSeries;

pub const TIME_COLUMN: &str = "t_sec";

/// Relative tolerance on the time step.
const STEP_TOLERANCE: f64 = 1e-6;

fn file_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::File {
        path: path.to_path_buf(),
        source,
    }
}

/// Rate implied by a uniform `t_sec` column; snapped to the nearest integer
/// when within tolerance so that `1 / 128`-style steps recover 128 Hz exactly.
fn infer_rate(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Err(Error::Csv("need at least two rows to infer the sample rate".into()));
    }
    let span = times[times.len() - 1] - times[0];
    let step = span / (times.len() - 1) as f64;
    if !(step > 0.0) {
        return Err(Error::Csv(format!("`{TIME_COLUMN}` must be increasing")));
    }
    for (i, w) in times.windows(2).enumerate() {
        if ((w[1] - w[0]) - step).abs() > STEP_TOLERANCE * step.max(1.0) + 1e-9 {
            return Err(Error::Csv(format!(
                "`{TIME_COLUMN}` step at row {} is {}, expected a uniform {step}",
                i + 2,
                w[1] - w[0]
            )));
        }
    }
    let rate = 1.0 / step;
    let rounded = rate.round();
    Ok(if (rate - rounded).abs() <= STEP_TOLERANCE * rate {
        rounded
    } else {
        rate
    })
}

pub fn read_csv<R: Read>(reader: R) -> Result<Vec<TimeSeries>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if headers.first().map(String::as_str) != Some(TIME_COLUMN) {
        return Err(Error::Csv(format!("first column must be `{TIME_COLUMN}`")));
    }
    if headers.len() < 2 {
        return Err(Error::Csv("no signal columns".into()));
    }
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        for (col, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                Error::Csv(format!(
                    "row {}, column `{}`: cannot parse `{field}`",
                    row + 2,
                    headers[col]
                ))
            })?;
            columns[col].push(v);
        }
    }
    let rate = infer_rate(&columns[0])?;
    headers
        .into_iter()
        .zip(columns)
        .skip(1)
        .map(|(name, samples)| TimeSeries::new(name, rate, samples))
        .collect()
}

pub fn read_csv_file(path: impl AsRef<Path>) -> Result<Vec<TimeSeries>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(file_error(path))?;
    read_csv(BufReader::new(file)).map_err(|e| match e {
        Error::Csv(msg) => Error::Csv(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Writes aligned series with a leading `t_sec` column.
pub fn write_csv<W: Write>(writer: W, series: &[TimeSeries]) -> Result<()> {
    let first = series.first().ok_or(Error::Empty("series list"))?;
    for s in series {
        crate::signal::check_same_rate(first.sample_rate_hz(), s.sample_rate_hz())?;
        if s.len() != first.len() {
            return Err(Error::LengthMismatch {
                expected: first.len(),
                found: s.len(),
            });
        }
    }
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(std::iter::once(TIME_COLUMN).chain(series.iter().map(|s| s.name())))?;
    let fs = first.sample_rate_hz();
    let mut row = Vec::with_capacity(series.len() + 1);
    for i in 0..first.len() {
        row.clear();
        row.push((i as f64 / fs).to_string());
        row.extend(series.iter().map(|s| s.samples()[i].to_string()));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_csv_file(path: impl AsRef<Path>, series: &[TimeSeries]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(file_error(path))?;
    let mut out = BufWriter::new(file);
    write_csv(&mut out, series)?;
    out.flush().map_err(file_error(path))
}

/// Finds a column by name, removing it from `series`.
pub fn take_column(series: &mut Vec<TimeSeries>, name: &str) -> Result<TimeSeries> {
    let pos = series
        .iter()
        .position(|s| s.name() == name)
        .ok_or_else(|| Error::MissingFeature(name.to_string()))?;
    Ok(series.remove(pos))
}
