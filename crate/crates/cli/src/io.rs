use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use morrey_core::solver::GridField;
use morrey_core::{Exponent, MeasureSpec, PiecewiseLinear, ScalarField, SignedMeasure};
use serde::Serialize;
use serde_json::Value;

use crate::args::{Format, Output};
use crate::error::CliError;

pub fn read_measure(path: &Path) -> Result<SignedMeasure, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let spec: MeasureSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(SignedMeasure::try_from(&spec)?)
}

/// Rejects `p ≤ n` as a configuration error before any computation.
pub fn exponent(p: f64, dim: usize) -> Result<Exponent, CliError> {
    if p.is_nan() || p <= dim as f64 {
        return Err(CliError::Config(format!("--p {p} must exceed the dimension {dim}")));
    }
    Exponent::new(p, dim).map_err(|e| CliError::Config(e.to_string()))
}

pub enum Field {
    Line(PiecewiseLinear),
    Grid(GridField),
}

impl Field {
    pub fn as_scalar(&self) -> &dyn ScalarField {
        match self {
            Field::Line(f) => f,
            Field::Grid(f) => f,
        }
    }
}

/// Reads `x[,y[,z]],u` samples; the column count must be `dim + 1`.
pub fn read_field(path: &Path, dim: usize) -> Result<Field, CliError> {
    let bad = |msg: String| CliError::Config(format!("{}: {msg}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let width = reader.headers().map_err(|e| bad(e.to_string()))?.len();
    if width != dim + 1 {
        return Err(bad(format!("expected {} columns for n = {dim}, found {width}", dim + 1)));
    }
    let mut samples = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let nums = record
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| bad(format!("row {}: {e}", row + 1)))?;
        samples.push((nums[..dim].to_vec(), nums[dim]));
    }
    if dim == 1 {
        samples.sort_by(|a, b| a.0[0].total_cmp(&b.0[0]));
        let (xs, us) = samples.into_iter().map(|(x, u)| (x[0], u)).unzip();
        PiecewiseLinear::new(xs, us)
            .map(Field::Line)
            .map_err(|e| CliError::Validation(e.to_string()))
    } else {
        Ok(Field::Grid(GridField::from_samples(dim, &samples)?))
    }
}

pub fn write_field_csv(u: &GridField, out: impl Write) -> io::Result<()> {
    let dim = u.grid().dim();
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = ["x", "y", "z"][..dim].to_vec();
    header.push("u");
    w.write_record(&header)?;
    for (x, v) in u.samples() {
        let mut row: Vec<String> = (0..dim).map(|k| x[k].to_string()).collect();
        row.push(v.to_string());
        w.write_record(&row)?;
    }
    w.flush()
}

/// Flattens nested JSON into dotted `key,value` rows.
fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&key(k), x, rows);
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), x, rows);
            }
        }
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        Value::Null => rows.push((prefix.to_string(), String::new())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

pub fn write_key_value_csv<T: Serialize>(report: &T, out: impl Write) -> Result<(), CliError> {
    let value = serde_json::to_value(report).map_err(|e| CliError::Config(e.to_string()))?;
    let mut rows = Vec::new();
    flatten("", &value, &mut rows);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["key", "value"]).map_err(csv_err)?;
    for (k, v) in rows {
        w.write_record([k, v]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Config(e.to_string())
}

pub fn open_output(output: &Output) -> Result<Box<dyn Write>, CliError> {
    Ok(match &output.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Writes `report` as pretty JSON, or hands the sink to `csv` for the CSV
/// format.
pub fn emit<T: Serialize>(
    report: &T,
    output: &Output,
    csv: impl FnOnce(&mut dyn Write) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let mut out = open_output(output)?;
    match output.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, report).map_err(|e| CliError::Config(e.to_string()))?;
            writeln!(out)?;
        }
        Format::Csv => csv(&mut out)?,
    }
    out.flush()?;
    Ok(())
}
