//! The ξ rank correlation.
//!
//! For a sample `(x_i, y_i)`, reorder the responses by ascending `x` to get
//! `y_(1), …, y_(n)` and count, for each position,
//!
//! ```text
//! r_i = #{j : y_(j) <= y_(i)}      l_i = #{j : y_(j) >= y_(i)}
//! ```
//!
//! The estimator is
//!
//! ```text
//! ξ_n = 1 - n · Σ_{i<n} |r_{i+1} - r_i| / (2 · Σ_i l_i (n - l_i))
//! ```
//!
//! Both sums are exact integers and are accumulated as such; the only
//! floating-point operation is the final division. Ties in `y` are handled
//! exactly by the counting definitions. Ties in `x` are broken uniformly at
//! random from an explicit seed.
//!
//! The coefficient is not symmetric: `xi_score(x, y)` measures how well `y`
//! is a function of `x`.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::seeding::{self, StreamRng};

/// Paired observations of one predictor and the response.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    x: &'a [f64],
    y: &'a [f64],
}

impl<'a> Sample<'a> {
    /// Validates equal lengths, `n >= 2`, and finiteness.
    pub fn new(x: &'a [f64], y: &'a [f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::invalid(format!(
                "length mismatch: x has {} values, y has {}",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 observations, got {}",
                x.len()
            )));
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("x[{i}] is not finite")));
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("y[{i}] is not finite")));
        }
        Ok(Sample { x, y })
    }

    pub fn x(&self) -> &'a [f64] {
        self.x
    }

    pub fn y(&self) -> &'a [f64] {
        self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Rank counts of the response after reordering by `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankCounts {
    /// `r_i = #{j : y_(j) <= y_(i)}`
    pub r: Vec<u64>,
    /// `l_i = #{j : y_(j) >= y_(i)}`
    pub l: Vec<u64>,
}

impl RankCounts {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// `Σ_{i<n} |r_{i+1} - r_i|`
    pub fn adjacent_variation(&self) -> u128 {
        self.r
            .windows(2)
            .map(|w| w[0].abs_diff(w[1]) as u128)
            .sum()
    }

    /// `Σ_i l_i (n - l_i)`
    pub fn spread(&self) -> u128 {
        let n = self.l.len() as u128;
        self.l
            .iter()
            .map(|&l| {
                let l = l as u128;
                l * (n - l)
            })
            .sum()
    }

    /// Evaluate the estimator from the counts.
    pub fn xi(&self) -> Result<f64> {
        let spread = self.spread();
        if spread == 0 {
            return Err(Error::DegenerateResponse);
        }
        let n = self.len() as u128;
        let num = n * self.adjacent_variation();
        let den = 2 * spread;
        Ok(1.0 - num as f64 / den as f64)
    }
}

/// Indices `0..n` ordered by ascending `x`, with tied runs shuffled from
/// `tie_seed`. The RNG is only created when a tie is present.
pub(crate) fn order_by_x(x: &[f64], tie_seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_unstable_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));

    let mut rng: Option<StreamRng> = None;
    let mut start = 0;
    while start < order.len() {
        let v = x[order[start]];
        let mut end = start + 1;
        while end < order.len() && x[order[end]] == v {
            end += 1;
        }
        if end - start > 1 {
            let rng = rng.get_or_insert_with(|| seeding::rng(tie_seed, &[]));
            order[start..end].shuffle(rng);
        }
        start = end;
    }
    order
}

/// Reorder `y` by ascending `x` (random tie-break) and count ranks.
pub fn rank_counts(sample: &Sample<'_>, tie_seed: u64) -> RankCounts {
    let order = order_by_x(sample.x, tie_seed);
    let reordered: Vec<f64> = order.iter().map(|&i| sample.y[i]).collect();
    counts_of(&reordered)
}

fn counts_of(y: &[f64]) -> RankCounts {
    let n = y.len() as u64;
    let mut sorted = y.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let mut r = Vec::with_capacity(y.len());
    let mut l = Vec::with_capacity(y.len());
    for &v in y {
        let le = sorted.partition_point(|&s| s <= v) as u64;
        let lt = sorted.partition_point(|&s| s < v) as u64;
        r.push(le);
        l.push(n - lt);
    }
    RankCounts { r, l }
}

/// The ξ estimator of how strongly `y` depends on `x`.
///
/// Returns [`Error::DegenerateResponse`] when `y` is constant.
pub fn xi_score(sample: &Sample<'_>, tie_seed: u64) -> Result<f64> {
    rank_counts(sample, tie_seed).xi()
}

/// Class sizes `(n0, n1)` of a {0,1} response; both must be non-zero.
pub(crate) fn binary_classes(y: &[f64]) -> Result<(usize, usize)> {
    let mut n0 = 0;
    let mut n1 = 0;
    for (i, &v) in y.iter().enumerate() {
        if v == 0.0 {
            n0 += 1;
        } else if v == 1.0 {
            n1 += 1;
        } else {
            return Err(Error::invalid(format!("y[{i}] = {v} is not binary")));
        }
    }
    if n0 == 0 || n1 == 0 {
        return Err(Error::invalid("binary response needs both classes present"));
    }
    Ok((n0, n1))
}

/// The binary-response statistic
///
/// ```text
/// (Σ_i (x_i - x̄)² / n) / (n1 · n0 / n²)
/// ```
///
/// This is not bounded by 1 (two points `x = [-1, 1]`, `y = [0, 1]` give 4);
/// it is meant for ranking predictors against a fixed response, where only
/// the relative order matters. It equals `(x̄1 - x̄0)² / r_pb²` whenever the
/// point-biserial coefficient is non-zero.
pub fn xi_binary_score(sample: &Sample<'_>) -> Result<f64> {
    let (n0, n1) = binary_classes(sample.y)?;
    let n = sample.len() as f64;
    let mean = sample.x.iter().sum::<f64>() / n;
    let ss: f64 = sample.x.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok((ss / n) / ((n1 as f64 * n0 as f64) / (n * n)))
}

/// A joint law on a finite grid: `probs[a][b] = P(X = x_support[a], Y = y_support[b])`.
#[derive(Debug, Clone)]
pub struct DiscreteJoint {
    x_support: Vec<f64>,
    y_support: Vec<f64>,
    probs: Vec<Vec<f64>>,
}

impl DiscreteJoint {
    pub fn new(x_support: Vec<f64>, y_support: Vec<f64>, probs: Vec<Vec<f64>>) -> Result<Self> {
        if probs.len() != x_support.len() {
            return Err(Error::invalid("probability rows must match the x support"));
        }
        if probs.iter().any(|row| row.len() != y_support.len()) {
            return Err(Error::invalid("probability columns must match the y support"));
        }
        for (name, support) in [("x", &x_support), ("y", &y_support)] {
            if support.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("{name} support has a non-finite point")));
            }
            for (i, a) in support.iter().enumerate() {
                if support[..i].contains(a) {
                    return Err(Error::invalid(format!("{name} support repeats {a}")));
                }
            }
        }
        if probs.iter().flatten().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::invalid("probabilities must be finite and non-negative"));
        }
        let total: f64 = probs.iter().flatten().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("probabilities sum to {total}, not 1")));
        }
        let joint = DiscreteJoint {
            x_support,
            y_support,
            probs,
        };
        if joint.y_marginal().iter().filter(|&&q| q > 0.0).count() < 2 {
            return Err(Error::DegenerateResponse);
        }
        Ok(joint)
    }

    /// Product law of independent marginals.
    pub fn independent(
        x_support: Vec<f64>,
        px: &[f64],
        y_support: Vec<f64>,
        qy: &[f64],
    ) -> Result<Self> {
        let probs = px
            .iter()
            .map(|&a| qy.iter().map(|&b| a * b).collect())
            .collect();
        Self::new(x_support, y_support, probs)
    }

    pub fn x_support(&self) -> &[f64] {
        &self.x_support
    }

    pub fn y_support(&self) -> &[f64] {
        &self.y_support
    }

    pub fn probs(&self) -> &[Vec<f64>] {
        &self.probs
    }

    pub fn x_marginal(&self) -> Vec<f64> {
        self.probs.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn y_marginal(&self) -> Vec<f64> {
        (0..self.y_support.len())
            .map(|b| self.probs.iter().map(|row| row[b]).sum())
            .collect()
    }

    /// Draw `n` i.i.d. pairs.
    pub fn sample(&self, n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
        use rand::distr::{weighted::WeightedIndex, Distribution};

        let ny = self.y_support.len();
        let weights: Vec<f64> = self.probs.iter().flatten().copied().collect();
        let cells = WeightedIndex::new(&weights).expect("validated probabilities");
        let mut rng = seeding::rng(seed, &[]);
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for _ in 0..n {
            let cell = cells.sample(&mut rng);
            x.push(self.x_support[cell / ny]);
            y.push(self.y_support[cell % ny]);
        }
        (x, y)
    }
}

/// Population ξ of a finite-support joint law:
///
/// ```text
/// ∫ var[E{I(Y >= t) | X}] dμ(t) / ∫ var{I(Y >= t)} dμ(t)
/// ```
///
/// with μ the law of `Y`, so both integrals are finite sums over the `y`
/// support. The result lies in `[0, 1]`.
pub fn xi_population_discrete(joint: &DiscreteJoint) -> Result<f64> {
    let px = joint.x_marginal();
    let qy = joint.y_marginal();
    let ys = &joint.y_support;

    let mut num = 0.0;
    let mut den = 0.0;
    for (&t, &weight) in ys.iter().zip(&qy) {
        if weight == 0.0 {
            continue;
        }
        let upper: f64 = ys
            .iter()
            .zip(&qy)
            .filter(|(&v, _)| v >= t)
            .map(|(_, &q)| q)
            .sum();
        den += weight * upper * (1.0 - upper);

        let mut between = 0.0;
        for (row, &pa) in joint.probs.iter().zip(&px) {
            if pa == 0.0 {
                continue;
            }
            let cond = ys
                .iter()
                .zip(row)
                .filter(|(&v, _)| v >= t)
                .map(|(_, &p)| p)
                .sum::<f64>()
                / pa;
            between += pa * (cond - upper) * (cond - upper);
        }
        num += weight * between;
    }
    if den <= 0.0 {
        return Err(Error::DegenerateResponse);
    }
    Ok((num / den).clamp(0.0, 1.0))
}
