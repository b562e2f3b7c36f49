//! Simulation designs and the replicated screening harness.
//!
//! Predictors are mean-zero Gaussian with `corr(X_i, X_j) = ρ^|i-j|`, drawn
//! row by row with the AR(1) recursion (no covariance factorization).
//! Responses follow one of four nonlinear models:
//!
//! | model | response |
//! |-------|----------|
//! | M1 | `2X1 + X2³ + 3 sin(8X3) + exp(X4) + ε`, ε ~ N(0,1) |
//! | M2 | `2 log\|X1\| + X2³ + cos(8X3²) + sqrt(\|X1+X2\|) ε`, ε ~ N(0,1) |
//! | M3 | `w(X1) + 2X2³ + 3 cos(8X3²) + exp(-X4) + ε`, X1 ~ U(-1,1), ε ~ Cauchy |
//! | M4 | `Y ~ Bernoulli(π)`, `logit π = X1³ + 3 sin(8X2) + exp(X3)` |
//!
//! where `w(x) = |x + 0.5|` for `x < 0` and `|x - 0.5|` otherwise. An
//! `Independent` model (pure-noise response) backs the concentration probe.
//!
//! M2 takes `log|X1|` because the Gaussian design puts half of X1 below zero.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rankcorr::{xi_score, Sample};
use crate::screening::{score_all, top_d, DataMatrix, Method, ResponseKind};
use crate::seeding::{self, tag};

/// An `n × p` design stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    n: usize,
    p: usize,
    values: Vec<f64>,
}

impl Design {
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

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[col * self.n + row]
    }

    pub fn into_data(self, y: Vec<f64>, kind: ResponseKind) -> Result<DataMatrix> {
        DataMatrix::from_columns(self.n, self.values, y, kind, None)
    }
}

/// Rows of N(0,1) marginals with `corr(X_i, X_j) = rho^|i-j|`.
pub fn gen_ar1_mvn(n: usize, p: usize, rho: f64, seed: u64) -> Result<Design> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::invalid(format!("rho must lie in [0, 1), got {rho}")));
    }
    if n == 0 || p == 0 {
        return Err(Error::invalid("design needs n >= 1 and p >= 1"));
    }
    let innovation = (1.0 - rho * rho).sqrt();
    let mut rng = seeding::rng(seed, &[tag::DESIGN]);
    let mut values = vec![0.0; n * p];
    for i in 0..n {
        let mut prev: f64 = rng.sample(StandardNormal);
        values[i] = prev;
        for j in 1..p {
            let z: f64 = rng.sample(StandardNormal);
            prev = rho * prev + innovation * z;
            values[j * n + i] = prev;
        }
    }
    Ok(Design { n, p, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ModelId {
    M1,
    M2,
    M3,
    M4,
    /// Response independent of every predictor.
    Independent,
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModelId::M1 => "M1",
            ModelId::M2 => "M2",
            ModelId::M3 => "M3",
            ModelId::M4 => "M4",
            ModelId::Independent => "independent",
        };
        f.write_str(s)
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "m1" => Ok(ModelId::M1),
            "m2" => Ok(ModelId::M2),
            "m3" => Ok(ModelId::M3),
            "m4" => Ok(ModelId::M4),
            "independent" | "null" => Ok(ModelId::Independent),
            other => Err(Error::invalid(format!("unknown model {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelSpec {
    pub id: ModelId,
    /// Zero-based indices of the predictors the response depends on.
    pub active_set: Vec<usize>,
}

fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// The bent absolute value in M3.
fn bent_abs(x: f64) -> f64 {
    if x < 0.0 {
        (x + 0.5).abs()
    } else {
        (x - 0.5).abs()
    }
}

impl ModelSpec {
    pub fn new(id: ModelId) -> Self {
        let active_set = match id {
            ModelId::M1 | ModelId::M3 => vec![0, 1, 2, 3],
            ModelId::M2 | ModelId::M4 => vec![0, 1, 2],
            ModelId::Independent => vec![],
        };
        ModelSpec { id, active_set }
    }

    pub fn response_kind(&self) -> ResponseKind {
        match self.id {
            ModelId::M4 => ResponseKind::Binary,
            _ => ResponseKind::Continuous,
        }
    }

    /// Number of leading predictors the model reads.
    pub fn width(&self) -> usize {
        self.active_set.iter().max().map_or(0, |&k| k + 1)
    }

    /// Noise-free part of the response for one row (`x` holds at least
    /// [`width`](Self::width) leading predictor values). For M4 this is the
    /// success probability.
    pub fn signal(&self, x: &[f64]) -> f64 {
        match self.id {
            ModelId::M1 => 2.0 * x[0] + x[1].powi(3) + 3.0 * (8.0 * x[2]).sin() + x[3].exp(),
            ModelId::M2 => {
                2.0 * x[0].abs().ln() + x[1].powi(3) + (8.0 * x[2] * x[2]).cos()
            }
            ModelId::M3 => {
                bent_abs(x[0]) + 2.0 * x[1].powi(3) + 3.0 * (8.0 * x[2] * x[2]).cos()
                    + (-x[3]).exp()
            }
            ModelId::M4 => {
                logistic(x[0].powi(3) + 3.0 * (8.0 * x[1]).sin() + x[2].exp())
            }
            ModelId::Independent => 0.0,
        }
    }

    /// Multiplier on the error term (heteroscedastic for M2).
    pub fn noise_scale(&self, x: &[f64]) -> f64 {
        match self.id {
            ModelId::M2 => (x[0] + x[1]).abs().sqrt(),
            _ => 1.0,
        }
    }
}

/// Generate the response for `design` under `spec`.
///
/// M3 first replaces column 0 of the design with U(-1, 1) draws. Noise,
/// the uniform column, and Bernoulli draws use separate streams derived from
/// `seed`.
pub fn apply_model(spec: &ModelSpec, design: &mut Design, seed: u64) -> Result<Vec<f64>> {
    let width = spec.width();
    if design.p() < width {
        return Err(Error::invalid(format!(
            "model {} reads {width} predictors, design has {}",
            spec.id,
            design.p()
        )));
    }
    if spec.id == ModelId::M3 {
        let mut rng = seeding::rng(seed, &[tag::UNIFORM]);
        let unif = Uniform::new(-1.0, 1.0).expect("valid range");
        for v in design.column_mut(0) {
            *v = unif.sample(&mut rng);
        }
    }
    let mut rng = seeding::rng(seed, &[tag::NOISE]);
    let mut row = vec![0.0; width];
    let y = (0..design.n())
        .map(|i| {
            for (k, slot) in row.iter_mut().enumerate() {
                *slot = design.get(i, k);
            }
            let signal = spec.signal(&row);
            match spec.id {
                ModelId::M1 | ModelId::M2 | ModelId::Independent => {
                    let e: f64 = rng.sample(StandardNormal);
                    signal + spec.noise_scale(&row) * e
                }
                ModelId::M3 => {
                    // t with one degree of freedom, as a ratio of normals
                    let a: f64 = rng.sample(StandardNormal);
                    let b: f64 = rng.sample(StandardNormal);
                    signal + a / b
                }
                ModelId::M4 => {
                    let u: f64 = rng.random();
                    if u < signal {
                        1.0
                    } else {
                        0.0
                    }
                }
            }
        })
        .collect();
    Ok(y)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub model: ModelSpec,
    pub n: usize,
    pub p: usize,
    pub rho: f64,
    pub replications: usize,
    pub d: usize,
    pub base_seed: u64,
    pub methods: Vec<Method>,
}

impl SimulationConfig {
    /// Desk-scale defaults: `p = 200`, `R = 100`, `ρ = 0.5`, `d = floor(n / ln n)`,
    /// XI-SIS, FanLv-SIS and DC-SIS.
    pub fn desk(id: ModelId, n: usize, base_seed: u64) -> Result<Self> {
        Ok(SimulationConfig {
            model: ModelSpec::new(id),
            n,
            p: 200,
            rho: 0.5,
            replications: 100,
            d: crate::screening::default_d(n)?,
            base_seed,
            methods: vec![Method::Xi, Method::Pearson, Method::Dcor],
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid("n must be at least 2"));
        }
        if self.p < self.model.width().max(1) {
            return Err(Error::invalid(format!(
                "p = {} is smaller than the model's active set",
                self.p
            )));
        }
        if self.replications < 1 {
            return Err(Error::invalid("need at least one replication"));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::invalid(format!("rho must lie in [0, 1), got {}", self.rho)));
        }
        if self.d < 1 {
            return Err(Error::invalid("d must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("no screening methods given"));
        }
        Ok(())
    }

    /// The data of replication `r`. Every method sees exactly this matrix.
    pub fn replicate(&self, r: usize) -> Result<DataMatrix> {
        let mut design = gen_ar1_mvn(
            self.n,
            self.p,
            self.rho,
            seeding::derive(self.base_seed, &[r as u64, tag::DESIGN]),
        )?;
        let y = apply_model(
            &self.model,
            &mut design,
            seeding::derive(self.base_seed, &[r as u64, tag::NOISE]),
        )?;
        design.into_data(y, self.model.response_kind())
    }

    pub fn tie_seed(&self, r: usize) -> u64 {
        seeding::derive(self.base_seed, &[r as u64, tag::TIES])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodReport {
    pub method: Method,
    /// Selection proportion of each active predictor, in `active_set` order.
    pub proportions: Vec<f64>,
    /// Wall-clock seconds spent scoring and selecting, summed over replications.
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub config: SimulationConfig,
    pub active_names: Vec<String>,
    pub methods: Vec<MethodReport>,
}

impl SimulationReport {
    pub fn proportions(&self, method: Method) -> Option<&[f64]> {
        self.methods
            .iter()
            .find(|m| m.method == method)
            .map(|m| m.proportions.as_slice())
    }

    /// Rows are active predictors, columns are methods.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("predictor");
        for m in &self.methods {
            out.push(',');
            out.push_str(m.method.name());
        }
        out.push('\n');
        for (i, name) in self.active_names.iter().enumerate() {
            out.push_str(name);
            for m in &self.methods {
                out.push_str(&format!(",{}", m.proportions[i]));
            }
            out.push('\n');
        }
        out
    }
}

struct ReplicationOutcome {
    hits: Vec<Vec<bool>>,
    elapsed: Vec<Duration>,
}

fn run_replication(config: &SimulationConfig, r: usize) -> Result<ReplicationOutcome> {
    let data = config.replicate(r)?;
    let tie_seed = config.tie_seed(r);
    let mut hits = Vec::with_capacity(config.methods.len());
    let mut elapsed = Vec::with_capacity(config.methods.len());
    for &method in &config.methods {
        let start = Instant::now();
        let scores = score_all(&data, method, tie_seed)?;
        let selection = top_d(&scores, config.d)?;
        elapsed.push(start.elapsed());
        hits.push(
            config
                .model
                .active_set
                .iter()
                .map(|&k| selection.is_selected(k))
                .collect(),
        );
    }
    Ok(ReplicationOutcome { hits, elapsed })
}

/// Replicated top-d screening; reports how often each active predictor is kept.
///
/// Replications run in parallel. The aggregate is a sum of indicator counts,
/// so proportions are identical for any worker count; only the timings vary.
pub fn run_simulation(config: &SimulationConfig) -> Result<SimulationReport> {
    config.validate()?;
    let outcomes: Vec<ReplicationOutcome> = (0..config.replications)
        .into_par_iter()
        .map(|r| {
            run_replication(config, r).map_err(|e| Error::Replication {
                index: r,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let q = config.model.active_set.len();
    let reps = config.replications as f64;
    let methods = config
        .methods
        .iter()
        .enumerate()
        .map(|(m, &method)| {
            let mut counts = vec![0usize; q];
            let mut total = Duration::ZERO;
            for o in &outcomes {
                for (c, &hit) in counts.iter_mut().zip(&o.hits[m]) {
                    *c += hit as usize;
                }
                total += o.elapsed[m];
            }
            MethodReport {
                method,
                proportions: counts.iter().map(|&c| c as f64 / reps).collect(),
                seconds: total.as_secs_f64(),
            }
        })
        .collect();

    Ok(SimulationReport {
        config: config.clone(),
        active_names: config
            .model
            .active_set
            .iter()
            .map(|k| format!("X{}", k + 1))
            .collect(),
        methods,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationConfig {
    pub model: ModelSpec,
    pub n_grid: Vec<usize>,
    pub p: usize,
    pub replications: usize,
    pub delta: f64,
    pub rho: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailFrequency {
    pub n: usize,
    /// Fraction of replications with `max_k |ω̂_k - ω_k| > delta`.
    pub frequency: f64,
    pub mean_max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub config: ConcentrationConfig,
    /// Sample size used to approximate the population scores; `None` when
    /// they are known exactly (independent model).
    pub reference_n: Option<usize>,
    pub population: Vec<f64>,
    pub tails: Vec<TailFrequency>,
}

fn xi_column_scores(data: &DataMatrix, tie_seed: u64) -> Result<Vec<f64>> {
    let y = data.response();
    data.columns()
        .enumerate()
        .map(|(k, x)| {
            xi_score(
                &Sample::new(x, y)?,
                crate::screening::column_tie_seed(tie_seed, k),
            )
        })
        .collect()
}

/// Population ξ per predictor: exact zeros for the independent model,
/// otherwise one large reference sample at `50 · max(n_grid)`.
fn population_scores(config: &ConcentrationConfig) -> Result<(Option<usize>, Vec<f64>)> {
    if config.model.id == ModelId::Independent {
        return Ok((None, vec![0.0; config.p]));
    }
    let n_ref = 50 * config.n_grid.iter().copied().max().unwrap_or(2);
    let mut design = gen_ar1_mvn(
        n_ref,
        config.p,
        config.rho,
        seeding::derive(config.seed, &[tag::REFERENCE, tag::DESIGN]),
    )?;
    let y = apply_model(
        &config.model,
        &mut design,
        seeding::derive(config.seed, &[tag::REFERENCE, tag::NOISE]),
    )?;
    let data = design.into_data(y, config.model.response_kind())?;
    let scores = xi_column_scores(&data, seeding::derive(config.seed, &[tag::REFERENCE, tag::TIES]))?;
    Ok((Some(n_ref), scores))
}

/// Empirical tail probability of the uniform deviation `max_k |ω̂_k - ω_k|`
/// at each sample size in `n_grid`.
pub fn concentration_experiment(config: &ConcentrationConfig) -> Result<ConcentrationReport> {
    if config.n_grid.is_empty() || config.n_grid.iter().any(|&n| n < 2) {
        return Err(Error::invalid("n_grid needs sample sizes >= 2"));
    }
    if config.replications < 1 {
        return Err(Error::invalid("need at least one replication"));
    }
    if config.p < config.model.width().max(1) {
        return Err(Error::invalid("p is smaller than the model's active set"));
    }
    if config.delta.is_nan() || config.delta <= 0.0 {
        return Err(Error::invalid("delta must be positive"));
    }
    let (reference_n, population) = population_scores(config)?;

    let tails = config
        .n_grid
        .iter()
        .map(|&n| {
            let deviations: Vec<f64> = (0..config.replications)
                .into_par_iter()
                .map(|r| {
                    let path = [n as u64, r as u64];
                    let mut design = gen_ar1_mvn(
                        n,
                        config.p,
                        config.rho,
                        seeding::derive(config.seed, &[path[0], path[1], tag::DESIGN]),
                    )?;
                    let y = apply_model(
                        &config.model,
                        &mut design,
                        seeding::derive(config.seed, &[path[0], path[1], tag::NOISE]),
                    )?;
                    let data = design.into_data(y, config.model.response_kind())?;
                    let scores = xi_column_scores(
                        &data,
                        seeding::derive(config.seed, &[path[0], path[1], tag::TIES]),
                    )?;
                    Ok(scores
                        .iter()
                        .zip(&population)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max))
                })
                .collect::<Result<_>>()
                .map_err(|e| Error::Replication {
                    index: n,
                    source: Box::new(e),
                })?;
            let reps = deviations.len() as f64;
            Ok(TailFrequency {
                n,
                frequency: deviations.iter().filter(|&&d| d > config.delta).count() as f64 / reps,
                mean_max_deviation: deviations.iter().sum::<f64>() / reps,
            })
        })
        .collect::<Result<_>>()?;

    Ok(ConcentrationReport {
        config: config.clone(),
        reference_n,
        population,
        tails,
    })
}
