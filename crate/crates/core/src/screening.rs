//! Marginal screening: score every predictor column against the response,
//! then keep the top `d` or every column above `c · n^(-κ)`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{dcor_score, pearson_score};
use crate::error::{Error, Result};
use crate::rankcorr::{binary_classes, xi_binary_score, xi_score, Sample};
use crate::seeding;

/// Score recorded for a column that could not be scored. Sorts below every
/// real score.
pub const DEGENERATE_SCORE: f64 = f64::MIN;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseKind {
    Continuous,
    Binary,
}

/// Predictors stored column-major plus one response.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    n: usize,
    p: usize,
    values: Vec<f64>,
    y: Vec<f64>,
    kind: ResponseKind,
    names: Vec<String>,
}

impl DataMatrix {
    /// `values` holds `p` columns of length `n` back to back.
    pub fn from_columns(
        n: usize,
        values: Vec<f64>,
        y: Vec<f64>,
        kind: ResponseKind,
        names: Option<Vec<String>>,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("need n >= 2, got {n}")));
        }
        if y.len() != n {
            return Err(Error::invalid(format!(
                "response has {} values, expected {n}",
                y.len()
            )));
        }
        if values.is_empty() || !values.len().is_multiple_of(n) {
            return Err(Error::invalid(format!(
                "{} predictor values do not form columns of length {n}",
                values.len()
            )));
        }
        let p = values.len() / n;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "predictor {} row {} is not finite",
                i / n,
                i % n
            )));
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("response row {i} is not finite")));
        }
        if kind == ResponseKind::Binary {
            binary_classes(&y)?;
        }
        let names = match names {
            Some(names) if names.len() != p => {
                return Err(Error::invalid(format!(
                    "{} names for {p} predictors",
                    names.len()
                )))
            }
            Some(names) => names,
            None => (1..=p).map(|k| format!("X{k}")).collect(),
        };
        Ok(DataMatrix {
            n,
            p,
            values,
            y,
            kind,
            names,
        })
    }

    pub fn from_column_vecs(
        columns: Vec<Vec<f64>>,
        y: Vec<f64>,
        kind: ResponseKind,
        names: Option<Vec<String>>,
    ) -> Result<Self> {
        let n = y.len();
        if let Some(k) = columns.iter().position(|c| c.len() != n) {
            return Err(Error::invalid(format!(
                "column {k} has {} values, expected {n}",
                columns[k].len()
            )));
        }
        Self::from_columns(n, columns.concat(), y, kind, names)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn column(&self, k: usize) -> &[f64] {
        &self.values[k * self.n..(k + 1) * self.n]
    }

    pub fn column_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.values[k * self.n..(k + 1) * self.n]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n)
    }

    pub fn response(&self) -> &[f64] {
        &self.y
    }

    pub fn response_kind(&self) -> ResponseKind {
        self.kind
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Xi,
    Pearson,
    Dcor,
    XiBinary,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Xi, Method::Pearson, Method::Dcor, Method::XiBinary];

    pub fn name(self) -> &'static str {
        match self {
            Method::Xi => "xi",
            Method::Pearson => "pearson",
            Method::Dcor => "dcor",
            Method::XiBinary => "xi-binary",
        }
    }

    pub fn requires_binary(self) -> bool {
        matches!(self, Method::XiBinary)
    }

    fn score(self, sample: &Sample<'_>, tie_seed: u64) -> Result<f64> {
        match self {
            Method::Xi => xi_score(sample, tie_seed),
            Method::Pearson => pearson_score(sample),
            Method::Dcor => dcor_score(sample),
            Method::XiBinary => xi_binary_score(sample),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "xi" => Ok(Method::Xi),
            "pearson" => Ok(Method::Pearson),
            "dcor" => Ok(Method::Dcor),
            "xi-binary" | "xi_binary" => Ok(Method::XiBinary),
            other => Err(Error::invalid(format!("unknown method {other:?}"))),
        }
    }
}

/// A column that received [`DEGENERATE_SCORE`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnWarning {
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreVector {
    pub scores: Vec<f64>,
    pub method: Method,
    pub tie_seed: u64,
    pub warnings: Vec<ColumnWarning>,
}

impl ScoreVector {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Indices by descending score, lower index first on ties.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.scores.len()).collect();
        order.sort_by(|&a, &b| {
            self.scores[b]
                .total_cmp(&self.scores[a])
                .then(a.cmp(&b))
        });
        order
    }
}

/// Seed used to break x-ties in column `k`.
pub fn column_tie_seed(tie_seed: u64, k: usize) -> u64 {
    seeding::derive(tie_seed, &[seeding::tag::TIES, k as u64])
}

/// Score every column of `data` with `method`.
///
/// Columns are scored in parallel on the current rayon pool; each column's
/// tie seed depends only on `(tie_seed, k)`, so the output does not depend on
/// the number of workers. Constant columns (and any column the method cannot
/// score) get [`DEGENERATE_SCORE`] and a warning.
pub fn score_all(data: &DataMatrix, method: Method, tie_seed: u64) -> Result<ScoreVector> {
    let y = data.response();
    if y.iter().all(|&v| v == y[0]) {
        return Err(Error::DegenerateResponse);
    }
    if method.requires_binary() && data.response_kind() != ResponseKind::Binary {
        return Err(Error::invalid(format!(
            "method {method} needs a binary response"
        )));
    }
    let results: Vec<std::result::Result<f64, String>> = (0..data.p())
        .into_par_iter()
        .map(|k| {
            let x = data.column(k);
            if x.iter().all(|&v| v == x[0]) {
                return Err("constant column".to_string());
            }
            let sample = Sample::new(x, y).map_err(|e| e.to_string())?;
            match method.score(&sample, column_tie_seed(tie_seed, k)) {
                Ok(v) if v.is_finite() => Ok(v),
                Ok(v) => Err(format!("non-finite score {v}")),
                Err(e) => Err(e.to_string()),
            }
        })
        .collect();

    let mut scores = Vec::with_capacity(results.len());
    let mut warnings = Vec::new();
    for (column, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => scores.push(v),
            Err(message) => {
                scores.push(DEGENERATE_SCORE);
                warnings.push(ColumnWarning { column, message });
            }
        }
    }
    Ok(ScoreVector {
        scores,
        method,
        tie_seed,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Selector {
    TopD { d: usize },
    Threshold { c: f64, kappa: f64, n: usize, cutoff: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScreeningResult {
    /// All column indices, best first.
    pub ranking: Vec<usize>,
    /// Selected column indices in ascending order.
    pub selected: Vec<usize>,
    pub selector: Selector,
}

impl ScreeningResult {
    pub fn is_selected(&self, k: usize) -> bool {
        self.selected.binary_search(&k).is_ok()
    }
}

/// Keep the `min(d, p)` best-scoring columns.
pub fn top_d(scores: &ScoreVector, d: usize) -> Result<ScreeningResult> {
    if d < 1 {
        return Err(Error::invalid("d must be at least 1"));
    }
    let ranking = scores.ranking();
    let mut selected: Vec<usize> = ranking.iter().take(d).copied().collect();
    selected.sort_unstable();
    Ok(ScreeningResult {
        ranking,
        selected,
        selector: Selector::TopD { d },
    })
}

/// Keep every column with `score >= c · n^(-κ)`; may select nothing.
pub fn threshold_select(
    scores: &ScoreVector,
    c: f64,
    kappa: f64,
    n: usize,
) -> Result<ScreeningResult> {
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::invalid(format!("c must be positive, got {c}")));
    }
    if !(kappa > 0.0 && kappa < 0.5) {
        return Err(Error::invalid(format!("kappa must lie in (0, 1/2), got {kappa}")));
    }
    if n < 1 {
        return Err(Error::invalid("n must be positive"));
    }
    let cutoff = c * (n as f64).powf(-kappa);
    let selected = scores
        .scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| s >= cutoff)
        .map(|(k, _)| k)
        .collect();
    Ok(ScreeningResult {
        ranking: scores.ranking(),
        selected,
        selector: Selector::Threshold {
            c,
            kappa,
            n,
            cutoff,
        },
    })
}

/// `floor(n / ln n)`, at least 1.
pub fn default_d(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::invalid(format!("default_d needs n >= 2, got {n}")));
    }
    let n_f = n as f64;
    Ok(((n_f / n_f.ln()).floor() as usize).max(1))
}
