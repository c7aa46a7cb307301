//! CSV ingestion and atomic file emission.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::data::DataMatrix;
use crate::error::{Error, Result};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, message: String) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        message,
    }
}

/// Reads all records, dropping a leading header row (detected by any
/// non-numeric field in the first record).
fn read_records(path: &Path) -> Result<Vec<Vec<String>>> {
    let file = std::fs::File::open(path).map_err(io_err(path))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| parse_err(path, e.to_string()))?;
        records.push(rec.iter().map(str::to_owned).collect::<Vec<_>>());
    }
    if records
        .first()
        .is_some_and(|r| r.iter().any(|f| f.parse::<f64>().is_err()))
    {
        records.remove(0);
    }
    Ok(records)
}

/// Reads a numeric CSV (rows = points, columns = features).
pub fn read_matrix(path: &Path) -> Result<DataMatrix> {
    let records = read_records(path)?;
    let m = records.first().map_or(0, Vec::len);
    let mut values = Vec::with_capacity(records.len() * m);
    for (i, rec) in records.iter().enumerate() {
        if rec.len() != m {
            return Err(parse_err(
                path,
                format!("row {i} has {} columns, expected {m}", rec.len()),
            ));
        }
        for (j, field) in rec.iter().enumerate() {
            let v = field.parse::<f64>().map_err(|_| {
                parse_err(
                    path,
                    format!("row {i}, column {j}: `{field}` is not a number"),
                )
            })?;
            values.push(v);
        }
    }
    DataMatrix::new(values, records.len(), m).map_err(|e| parse_err(path, e.to_string()))
}

/// Reads an `index,label` file (or a single label column). Indices must run 0, 1, 2, ...
pub fn read_labels(path: &Path) -> Result<Vec<u32>> {
    let records = read_records(path)?;
    records
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            let field = match rec.as_slice() {
                [label] => label,
                [index, label, ..] => {
                    if index.parse::<usize>().ok() != Some(i) {
                        return Err(parse_err(
                            path,
                            format!("row {i}: expected index {i}, got `{index}`"),
                        ));
                    }
                    label
                }
                [] => return Err(parse_err(path, format!("row {i} is empty"))),
            };
            field
                .parse::<u32>()
                .map_err(|_| parse_err(path, format!("row {i}: `{field}` is not a cluster label")))
        })
        .collect()
}

/// Float with 17 significant digits; infinities as `inf` / `-inf`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_owned()
    } else {
        format!("{v:.16e}")
    }
}

/// Writes `contents` to a temp file beside `path`, then renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(path))?;
    tmp.write_all(contents.as_bytes()).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| io_err(path)(e.error))?;
    Ok(())
}

pub fn matrix_csv(data: &DataMatrix) -> String {
    let mut out = String::new();
    let header: Vec<String> = (0..data.ncols()).map(|j| format!("x{j}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in data.rows() {
        let fields: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn labels_csv(labels: &[u32]) -> String {
    let mut out = String::from("index,label\n");
    for (i, l) in labels.iter().enumerate() {
        let _ = writeln!(out, "{i},{l}");
    }
    out
}
