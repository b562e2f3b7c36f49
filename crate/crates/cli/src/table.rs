//! CSV ingestion into a [`DataMatrix`].

use std::collections::HashMap;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use xisis::screening::{DataMatrix, ResponseKind};

/// Which column holds the response: a header name, or `#k` for the 0-based
/// column index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Name(String),
    Index(usize),
}

impl FromStr for ColumnSelector {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.strip_prefix('#') {
            Some(idx) => Ok(ColumnSelector::Index(
                idx.parse().with_context(|| format!("bad column index {s:?}"))?,
            )),
            None if s.is_empty() => bail!("empty column selector"),
            None => Ok(ColumnSelector::Name(s.to_string())),
        }
    }
}

impl ColumnSelector {
    fn resolve(&self, headers: &[String]) -> Result<usize> {
        match self {
            ColumnSelector::Index(i) if *i < headers.len() => Ok(*i),
            ColumnSelector::Index(i) => {
                bail!("column #{i} out of range: file has {} columns", headers.len())
            }
            ColumnSelector::Name(name) => headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| anyhow!("no column named {name:?}")),
        }
    }
}

/// Parse `ALL=0,AML=1` into a label map.
pub fn parse_labels(s: &str) -> Result<HashMap<String, f64>> {
    let mut map = HashMap::new();
    for pair in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (label, value) = pair
            .split_once('=')
            .ok_or_else(|| anyhow!("label mapping {pair:?} is not of the form label=value"))?;
        let value: f64 = value
            .trim()
            .parse()
            .with_context(|| format!("label {label:?} maps to a non-number"))?;
        map.insert(label.trim().to_string(), value);
    }
    if map.is_empty() {
        bail!("empty label mapping");
    }
    Ok(map)
}

#[derive(Debug, Clone)]
pub struct TableFile {
    pub path: PathBuf,
    pub delimiter: u8,
    pub has_header: bool,
    pub response: ColumnSelector,
    /// Maps string response labels to numbers.
    pub labels: Option<HashMap<String, f64>>,
    /// Columns to ignore entirely.
    pub drop: Vec<ColumnSelector>,
}

impl TableFile {
    pub fn new(path: impl Into<PathBuf>, response: ColumnSelector) -> Self {
        TableFile {
            path: path.into(),
            delimiter: b',',
            has_header: true,
            response,
            labels: None,
            drop: Vec::new(),
        }
    }
}

/// What ingestion inferred about the table.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct IngestSummary {
    pub rows: usize,
    pub predictors: usize,
    pub response_column: String,
    pub response_kind: ResponseKind,
    pub labels_applied: bool,
    pub dropped: Vec<String>,
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "na" | "N/A" | "null" | "NULL")
}

/// Read a CSV into a [`DataMatrix`], splitting out the response.
///
/// Missing cells are an error listing every offending coordinate; nothing is
/// imputed. The response is binary iff its distinct values are exactly
/// {0, 1} (after label mapping).
pub fn ingest_csv(file: &TableFile) -> Result<(DataMatrix, IngestSummary)> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(file.delimiter)
        .has_headers(file.has_header)
        .trim(csv::Trim::All)
        .from_path(&file.path)
        .with_context(|| format!("cannot open {}", file.path.display()))?;

    let records: Vec<csv::StringRecord> = reader
        .records()
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("malformed CSV in {}", file.path.display()))?;
    if records.is_empty() {
        bail!("{} has no data rows", file.path.display());
    }
    let width = records[0].len();
    let headers: Vec<String> = if file.has_header {
        reader.headers()?.iter().map(str::to_string).collect()
    } else {
        (1..=width).map(|k| format!("V{k}")).collect()
    };

    let response = file.response.resolve(&headers)?;
    let mut dropped = Vec::new();
    for sel in &file.drop {
        let k = sel.resolve(&headers)?;
        if k == response {
            bail!("cannot drop the response column");
        }
        dropped.push(k);
    }
    let predictors: Vec<usize> = (0..width)
        .filter(|k| *k != response && !dropped.contains(k))
        .collect();
    if predictors.is_empty() {
        bail!("no predictor columns left");
    }

    // header line counts as line 1
    let line_of = |row: usize| row + 1 + usize::from(file.has_header);

    let missing: Vec<String> = records
        .iter()
        .enumerate()
        .flat_map(|(r, rec)| {
            rec.iter()
                .enumerate()
                .filter(|(k, cell)| !dropped.contains(k) && is_missing(cell))
                .map(move |(k, _)| (r, k))
        })
        .map(|(r, k)| format!("line {} column {:?}", line_of(r), headers[k]))
        .collect();
    if !missing.is_empty() {
        bail!("missing values at: {}", missing.join(", "));
    }

    let n = records.len();
    let mut values = Vec::with_capacity(n * predictors.len());
    for &k in &predictors {
        for (r, rec) in records.iter().enumerate() {
            let cell = &rec[k];
            let v: f64 = cell.parse().map_err(|_| {
                anyhow!(
                    "non-numeric value {cell:?} at line {} column {:?}",
                    line_of(r),
                    headers[k]
                )
            })?;
            if !v.is_finite() {
                bail!("non-finite value {cell:?} at line {} column {:?}", line_of(r), headers[k]);
            }
            values.push(v);
        }
    }

    let y: Vec<f64> = records
        .iter()
        .enumerate()
        .map(|(r, rec)| {
            let cell = &rec[response];
            match &file.labels {
                Some(map) => map.get(cell).copied().ok_or_else(|| {
                    anyhow!("response label {cell:?} at line {} has no mapping", line_of(r))
                }),
                None => cell
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        anyhow!(
                            "non-numeric response {cell:?} at line {} (use --labels for class names)",
                            line_of(r)
                        )
                    }),
            }
        })
        .collect::<Result<_>>()?;

    let binary = y.iter().all(|&v| v == 0.0 || v == 1.0)
        && y.contains(&0.0)
        && y.contains(&1.0);
    let kind = if binary {
        ResponseKind::Binary
    } else {
        ResponseKind::Continuous
    };

    let names: Vec<String> = predictors.iter().map(|&k| headers[k].clone()).collect();
    let data = DataMatrix::from_columns(n, values, y, kind, Some(names))
        .with_context(|| format!("invalid data in {}", file.path.display()))?;
    let summary = IngestSummary {
        rows: n,
        predictors: predictors.len(),
        response_column: headers[response].clone(),
        response_kind: kind,
        labels_applied: file.labels.is_some(),
        dropped: dropped.iter().map(|&k| headers[k].clone()).collect(),
    };
    Ok((data, summary))
}

/// Centre and scale every non-constant column to mean 0, sample variance 1
/// (divisor `n - 1`). Constant columns are left as they are and reported.
pub fn standardize(data: &DataMatrix) -> Result<(DataMatrix, Vec<String>)> {
    let n = data.n() as f64;
    let mut warnings = Vec::new();
    let columns: Vec<Vec<f64>> = data
        .columns()
        .enumerate()
        .map(|(k, col)| {
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
            if var == 0.0 {
                warnings.push(format!(
                    "column {:?} is constant and was not standardized",
                    data.names()[k]
                ));
                col.to_vec()
            } else {
                let sd = var.sqrt();
                col.iter().map(|v| (v - mean) / sd).collect()
            }
        })
        .collect();
    let out = DataMatrix::from_column_vecs(
        columns,
        data.response().to_vec(),
        data.response_kind(),
        Some(data.names().to_vec()),
    )?;
    Ok((out, warnings))
}
