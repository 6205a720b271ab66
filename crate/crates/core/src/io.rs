//! CSV reading and writing for datasets and weight vectors.
//!
//! Files carry a header line. One column holds the label; every other
//! column is a numeric feature, except an optional `domain` column
//! (`source`/`target`) used by combined files.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::data::{Dataset, Domain};
use crate::error::{Error, Result};

/// Column layout of a dataset file.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSchema {
    pub label_column: String,
    /// Raw values mapped to class 1.
    pub positive_values: Vec<String>,
    /// Raw values mapped to class 0.
    pub negative_values: Vec<String>,
    /// Column holding `source`/`target` tags, if any.
    pub domain_column: Option<String>,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            label_column: "label".into(),
            positive_values: vec!["1".into()],
            negative_values: vec!["0".into()],
            domain_column: Some("domain".into()),
        }
    }
}

impl CsvSchema {
    pub fn with_label(label_column: impl Into<String>) -> Self {
        Self {
            label_column: label_column.into(),
            ..Default::default()
        }
    }

    fn map_label(&self, raw: &str) -> Option<u8> {
        let raw = raw.trim();
        if self.positive_values.iter().any(|v| v == raw) {
            Some(1)
        } else if self.negative_values.iter().any(|v| v == raw) {
            Some(0)
        } else {
            None
        }
    }
}

struct Table {
    feature_names: Vec<String>,
    x: Vec<f64>,
    y: Vec<u8>,
    domains: Option<Vec<Domain>>,
}

fn read_table(path: &Path, schema: &CsvSchema) -> Result<Table> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.is_empty() {
        return Err(Error::EmptyDataset(format!("{} has no header", path.display())));
    }
    let label_idx = headers
        .iter()
        .position(|h| h.trim() == schema.label_column)
        .ok_or_else(|| Error::MissingColumn {
            path: path.to_path_buf(),
            column: schema.label_column.clone(),
        })?;
    let domain_idx = schema
        .domain_column
        .as_deref()
        .and_then(|name| headers.iter().position(|h| h.trim() == name));
    let feature_cols: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != label_idx && Some(*i) != domain_idx)
        .map(|(i, h)| (i, h.trim().to_string()))
        .collect();

    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut domains = domain_idx.map(|_| Vec::new());
    for (k, record) in reader.records().enumerate() {
        let record = record?;
        // Header is line 1.
        let row = k + 2;
        for (col, name) in &feature_cols {
            let raw = record.get(*col).unwrap_or("").trim();
            let value: f64 = raw.parse().map_err(|_| Error::NonNumeric {
                path: path.to_path_buf(),
                row,
                column: name.clone(),
                value: raw.to_string(),
            })?;
            if !value.is_finite() {
                return Err(Error::NonNumeric {
                    path: path.to_path_buf(),
                    row,
                    column: name.clone(),
                    value: raw.to_string(),
                });
            }
            x.push(value);
        }
        let raw = record.get(label_idx).unwrap_or("");
        let label = schema.map_label(raw).ok_or_else(|| Error::UnknownLabel {
            path: path.to_path_buf(),
            row,
            value: raw.to_string(),
        })?;
        y.push(label);
        if let (Some(idx), Some(ds)) = (domain_idx, domains.as_mut()) {
            let raw = record.get(idx).unwrap_or("").trim();
            let domain = match raw {
                "source" => Domain::Source,
                "target" => Domain::Target,
                _ => {
                    return Err(Error::UnknownDomain {
                        path: path.to_path_buf(),
                        row,
                        value: raw.to_string(),
                    })
                }
            };
            ds.push(domain);
        }
    }
    if y.is_empty() {
        return Err(Error::EmptyDataset(format!("{} has no data rows", path.display())));
    }
    Ok(Table {
        feature_names: feature_cols.into_iter().map(|(_, n)| n).collect(),
        x,
        y,
        domains,
    })
}

/// Loads a single-domain file. A `domain` column, if present, is ignored.
pub fn load_dataset(path: impl AsRef<Path>, schema: &CsvSchema, domain: Domain) -> Result<Dataset> {
    let table = read_table(path.as_ref(), schema)?;
    Dataset::new(domain, table.feature_names.len(), table.x, table.y)
}

/// Loads a combined file and splits it by its domain column into
/// `(source, target)`, preserving file order within each part.
pub fn load_domains(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<(Dataset, Dataset)> {
    let path = path.as_ref();
    let table = read_table(path, schema)?;
    let domains = table.domains.ok_or_else(|| Error::MissingColumn {
        path: path.to_path_buf(),
        column: schema.domain_column.clone().unwrap_or_else(|| "domain".into()),
    })?;
    let d = table.feature_names.len();
    let mut parts = [(Vec::new(), Vec::new()), (Vec::new(), Vec::new())];
    for (i, dom) in domains.iter().enumerate() {
        let part = &mut parts[usize::from(*dom == Domain::Target)];
        part.0.extend_from_slice(&table.x[i * d..(i + 1) * d]);
        part.1.push(table.y[i]);
    }
    let [(xs, ys), (xt, yt)] = parts;
    Ok((
        Dataset::new(Domain::Source, d, xs, ys)?,
        Dataset::new(Domain::Target, d, xt, yt)?,
    ))
}

/// Writes `f0..f{d-1},label`. Floats use the shortest representation that
/// parses back to the same bits.
pub fn write_dataset(path: impl AsRef<Path>, ds: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = (0..ds.d()).map(|j| format!("f{j}")).collect();
    header.push("label".into());
    w.write_record(&header)?;
    for (row, &label) in ds.rows().zip(ds.labels()) {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        rec.push(label.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes named numeric columns of equal length.
pub fn write_columns(path: impl AsRef<Path>, columns: &[(&str, &[f64])]) -> Result<()> {
    let n = columns.first().map(|(_, c)| c.len()).unwrap_or(0);
    for (name, c) in columns {
        if c.len() != n {
            return Err(Error::LengthMismatch {
                what: "csv column",
                expected: n,
                actual: c.len(),
            });
        }
        debug_assert!(!name.contains(','));
    }
    let mut f = std::io::BufWriter::new(File::create(path)?);
    let header: Vec<&str> = columns.iter().map(|(name, _)| *name).collect();
    writeln!(f, "{}", header.join(","))?;
    for i in 0..n {
        let rec: Vec<String> = columns.iter().map(|(_, c)| c[i].to_string()).collect();
        writeln!(f, "{}", rec.join(","))?;
    }
    f.flush()?;
    Ok(())
}

/// Single-column `weight` file, one row per source sample.
pub fn write_weights(path: impl AsRef<Path>, weights: &[f64]) -> Result<()> {
    write_columns(path, &[("weight", weights)])
}

pub fn read_weights(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let mut reader = csv::Reader::from_path(path)?;
    let idx = reader
        .headers()?
        .iter()
        .position(|h| h.trim() == "weight")
        .ok_or_else(|| Error::MissingColumn {
            path: path.to_path_buf(),
            column: "weight".into(),
        })?;
    let mut out = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec?;
        let raw = rec.get(idx).unwrap_or("").trim();
        out.push(raw.parse().map_err(|_| Error::NonNumeric {
            path: path.to_path_buf(),
            row: k + 2,
            column: "weight".into(),
            value: raw.to_string(),
        })?);
    }
    Ok(out)
}
