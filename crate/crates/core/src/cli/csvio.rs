//! Point and curve tables as CSV.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::clustering::Dataset;
use crate::error::{Error, Result};

fn csv_err(path: &Path, row: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        row,
        column,
        message: message.into(),
    }
}

fn io_context(path: &Path, e: std::io::Error) -> Error {
    Error::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Read one point per row. A first row with no numeric cell is a header.
///
/// Rows and columns in error messages are 1-based and count the header.
pub fn parse_csv(path: &Path) -> Result<Dataset> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| io_context(path, e))?;
    parse_csv_str(&text, path)
}

/// [`parse_csv`] on in-memory text; `path` only labels diagnostics.
pub fn parse_csv_str(text: &str, path: &Path) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut dim = None;
    let mut coords = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let row = e.position().map_or(0, |p| p.line() as usize);
            csv_err(path, row, 0, e.to_string())
        })?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if std::mem::take(&mut first) && record.iter().all(|c| c.parse::<f64>().is_err()) {
            continue;
        }
        let width = *dim.get_or_insert(record.len());
        if record.len() != width {
            return Err(csv_err(
                path,
                row,
                record.len().min(width) + 1,
                format!("expected {width} columns, found {}", record.len()),
            ));
        }
        for (j, cell) in record.iter().enumerate() {
            let x: f64 = cell
                .parse()
                .map_err(|_| csv_err(path, row, j + 1, format!("not a number: {cell:?}")))?;
            if !x.is_finite() {
                return Err(csv_err(path, row, j + 1, format!("non-finite value {cell:?}")));
            }
            coords.push(x);
        }
    }
    let Some(dim) = dim else {
        return Err(Error::Input {
            path: path.to_path_buf(),
            message: "no data rows".to_string(),
        });
    };
    Dataset::new(dim, coords)
}

fn create(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|e| io_context(path, e))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn finish(mut w: csv::Writer<BufWriter<File>>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| io_context(path, e))
}

fn csv_io(path: &Path, e: csv::Error) -> Error {
    Error::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Write points one per row; `header` adds `x0,x1,...`.
pub fn write_csv(path: &Path, data: &Dataset, header: bool) -> Result<()> {
    let mut w = create(path)?;
    if header {
        let names: Vec<String> = (0..data.dim()).map(|j| format!("x{j}")).collect();
        w.write_record(&names).map_err(|e| csv_io(path, e))?;
    }
    for p in data.points() {
        w.write_record(p.iter().map(|x| x.to_string()))
            .map_err(|e| csv_io(path, e))?;
    }
    finish(w, path)
}

/// Write a table whose cells are already formatted.
pub fn write_table<R, C>(path: &Path, header: &[&str], rows: R) -> Result<()>
where
    R: IntoIterator<Item = Vec<C>>,
    C: AsRef<[u8]>,
{
    let mut w = create(path)?;
    w.write_record(header).map_err(|e| csv_io(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_io(path, e))?;
    }
    finish(w, path)
}

/// Penalized curve as written by [`write_curve_csv`].
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub ks: Vec<usize>,
    pub raw_errors: Vec<f64>,
    pub penalized: Vec<f64>,
}

pub const CURVE_HEADER: [&str; 3] = ["k", "raw_error", "penalized_error"];

pub fn write_curve_csv(path: &Path, ks: &[usize], raw: &[f64], penalized: &[f64]) -> Result<()> {
    let rows = ks
        .iter()
        .zip(raw)
        .zip(penalized)
        .map(|((k, e), p)| vec![k.to_string(), e.to_string(), p.to_string()]);
    write_table(path, &CURVE_HEADER, rows)
}

pub fn read_curve_csv(path: &Path) -> Result<CurveTable> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_io(path, e))?;
    let header = reader.headers().map_err(|e| csv_io(path, e))?.clone();
    if header.iter().ne(CURVE_HEADER) {
        return Err(csv_err(path, 1, 1, format!("expected header {}", CURVE_HEADER.join(","))));
    }
    let mut table = CurveTable {
        ks: Vec::new(),
        raw_errors: Vec::new(),
        penalized: Vec::new(),
    };
    for record in reader.records() {
        let record = record.map_err(|e| csv_io(path, e))?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        let cell = |j: usize| record.get(j).unwrap_or("");
        let bad = |j: usize| csv_err(path, row, j + 1, format!("not a number: {:?}", cell(j)));
        table.ks.push(cell(0).parse().map_err(|_| bad(0))?);
        table.raw_errors.push(cell(1).parse().map_err(|_| bad(1))?);
        table.penalized.push(cell(2).parse().map_err(|_| bad(2))?);
    }
    Ok(table)
}

/// One label per row under a `label` header; `None` is written as -1.
pub fn write_labels(path: &Path, labels: impl IntoIterator<Item = Option<usize>>) -> Result<()> {
    let rows = labels
        .into_iter()
        .map(|l| vec![l.map_or_else(|| "-1".to_string(), |l| l.to_string())]);
    write_table(path, &["label"], rows)
}

/// Write a string to `path` with I/O errors naming the file.
pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    File::create(path)
        .and_then(|mut f| f.write_all(text.as_bytes()))
        .map_err(|e| io_context(path, e))
}
