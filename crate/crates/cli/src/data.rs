//! CSV ingestion (RFC 4180, header required) and locale-independent CSV output.

use std::io::{Read, Write};
use std::path::Path;

use condcopula_core::BivariateSample;

use crate::config::DataSpec;
use crate::error::{Error, Result};

/// Reads named numeric columns. Row numbers in errors count data rows from 1.
pub fn read_columns<R: Read>(reader: R, source: &str, columns: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut csv = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = csv.headers()?.clone();
    let idx: Vec<usize> = columns
        .iter()
        .map(|name| {
            headers.iter().position(|h| h == *name).ok_or_else(|| Error::Data {
                path: source.to_string(),
                message: format!("missing column `{name}` (found: {})", headers.iter().collect::<Vec<_>>().join(", ")),
            })
        })
        .collect::<Result<_>>()?;
    let mut out = vec![Vec::new(); columns.len()];
    for (row, record) in csv.records().enumerate() {
        let record = record?;
        for (k, &i) in idx.iter().enumerate() {
            let raw = record.get(i).unwrap_or("");
            let value: f64 = raw.parse().map_err(|_| Error::Data {
                path: source.to_string(),
                message: format!("row {}: column `{}`: cannot parse {raw:?} as a number", row + 1, columns[k]),
            })?;
            out[k].push(value);
        }
    }
    Ok(out)
}

/// Natural logarithm of every entry, rejecting nonpositive values.
pub fn log_column(values: &mut [f64], source: &str, column: &str) -> Result<()> {
    for (row, v) in values.iter_mut().enumerate() {
        if !(*v > 0.0) {
            return Err(Error::Data {
                path: source.to_string(),
                message: format!("row {}: column `{column}`: log transform of nonpositive value {v}", row + 1),
            });
        }
        *v = v.ln();
    }
    Ok(())
}

/// Two-column sample from a CSV file.
pub fn read_sample(path: &Path, x_column: &str, y_column: &str, log_x: bool, log_y: bool) -> Result<BivariateSample> {
    let source = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|e| Error::Data { path: source.clone(), message: e.to_string() })?;
    read_sample_from(file, &source, x_column, y_column, log_x, log_y)
}

pub fn read_sample_from<R: Read>(
    reader: R,
    source: &str,
    x_column: &str,
    y_column: &str,
    log_x: bool,
    log_y: bool,
) -> Result<BivariateSample> {
    let mut cols = read_columns(reader, source, &[x_column, y_column])?;
    let mut ys = cols.pop().unwrap_or_default();
    let mut xs = cols.pop().unwrap_or_default();
    if log_x {
        log_column(&mut xs, source, x_column)?;
    }
    if log_y {
        log_column(&mut ys, source, y_column)?;
    }
    Ok(BivariateSample::from_columns(&xs, &ys)?)
}

pub fn read_data_spec(spec: &DataSpec) -> Result<BivariateSample> {
    read_sample(&spec.path, &spec.x_column, &spec.y_column, spec.log_x, spec.log_y)
}

/// Writes a header and rows using shortest round-trip float formatting.
pub fn write_table<W: Write>(writer: W, headers: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(headers)?;
    for row in rows {
        csv.write_record(row.iter().map(|v| v.to_string()))?;
    }
    csv.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_named_columns_in_any_order() {
        let text = "alae,loss\n2,10\n3,20\n";
        let s = read_sample_from(text.as_bytes(), "mem", "loss", "alae", false, false).unwrap();
        assert_eq!(s.pairs(), &[(10.0, 2.0), (20.0, 3.0)]);
    }

    #[test]
    fn log_transform_and_errors() {
        let s = read_sample_from("x,y\n1,1\n2.718281828459045,4\n".as_bytes(), "mem", "x", "y", true, false).unwrap();
        assert_eq!(s.pairs()[0].0, 0.0);
        let err = read_sample_from("x,y\n1,1\n0,4\n".as_bytes(), "mem", "x", "y", true, false).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
        let err = read_sample_from("x,y\n1,abc\n".as_bytes(), "mem", "x", "y", false, false).unwrap_err();
        assert!(err.to_string().contains("row 1") && err.to_string().contains("`y`"), "{err}");
        let err = read_sample_from("a,b\n1,1\n".as_bytes(), "mem", "x", "y", false, false).unwrap_err();
        assert!(err.to_string().contains("missing column `x`"), "{err}");
    }

    #[test]
    fn output_uses_dot_decimals() {
        let mut buf = Vec::new();
        write_table(&mut buf, &["x", "mean"], vec![vec![0.5, 1e-3], vec![2.0, -1.25]]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,mean\n0.5,0.001\n2,-1.25\n");
    }
}
