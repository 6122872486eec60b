//! Dataset CSV format: UTF-8, header `x1,...,xd,label`, one data point per
//! row in index order. Features are written in shortest round-trip decimal
//! form, so `read_csv(write_csv(ds)) == ds`.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use stiknn_core::{Dataset, LabelInterner, LabeledPoint, Role};

use crate::error::{Error, Result};

/// Reads a dataset with a fresh label vocabulary.
pub fn read_csv(path: impl AsRef<Path>, role: Role) -> Result<Dataset> {
    read_csv_with(path, &mut LabelInterner::new(), role)
}

/// Reads a dataset, interning labels into `labels`. Read the train and test
/// files through the same interner so their label ids agree.
pub fn read_csv_with(path: impl AsRef<Path>, labels: &mut LabelInterner, role: Role) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_csv(file, path, labels, role)
}

/// Parses CSV text from any reader; `source` only labels error messages.
pub fn parse_csv<R: Read>(reader: R, source: &Path, labels: &mut LabelInterner, role: Role) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();

    let header = match records.next() {
        None => return Err(Error::format(source, 1, "empty file")),
        Some(r) => r.map_err(|e| csv_error(source, e))?,
    };
    let width = header.len();
    if width < 2 || header.get(width - 1) != Some("label") {
        return Err(Error::format(source, 1, "missing label column (last header must be `label`)"));
    }
    let dim = width - 1;

    let mut points = Vec::new();
    for record in records {
        let record = record.map_err(|e| csv_error(source, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(Error::format(
                source,
                line,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        let mut features = Vec::with_capacity(dim);
        for (col, cell) in record.iter().take(dim).enumerate() {
            let x: f64 = cell.parse().map_err(|_| {
                Error::format(source, line, format!("non-numeric feature {cell:?} in column {}", col + 1))
            })?;
            if !x.is_finite() {
                return Err(Error::format(source, line, format!("non-finite feature {cell:?}")));
            }
            features.push(x);
        }
        let label = &record[dim];
        if label.is_empty() {
            return Err(Error::format(source, line, "empty label"));
        }
        points.push(LabeledPoint::new(features, labels.intern(label)));
    }
    if points.is_empty() {
        return Err(Error::format(source, 2, "no data rows"));
    }
    Ok(Dataset::new(points, labels.names().to_vec(), role)?)
}

fn csv_error(source: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::format(source, line, e.to_string())
}

/// Serialises `dataset` in the CSV format above.
pub fn to_csv_string(dataset: &Dataset) -> Result<String> {
    let mut out = String::new();
    for d in 1..=dataset.dim() {
        out.push_str(&format!("x{d},"));
    }
    out.push_str("label\n");
    for p in dataset.points() {
        for x in &p.features {
            out.push_str(&format!("{x:?},"));
        }
        let name = dataset.label_name(p.label);
        if name.contains([',', '\n', '\r', '"']) || name.trim() != name || name.is_empty() {
            return Err(Error::Invalid(format!("label {name:?} cannot be written to CSV")));
        }
        out.push_str(name);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = to_csv_string(dataset)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}
