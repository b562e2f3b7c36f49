//! Competing marginal utilities: absolute Pearson correlation (FanLv-SIS),
//! distance correlation (DC-SIS), and the point-biserial coefficient.

use crate::error::{Error, Result};
use crate::rankcorr::{binary_classes, Sample};

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|&a| a == v[0])
}

/// `|corr(x, y)|`, the FanLv-SIS utility.
pub fn pearson_score(sample: &Sample<'_>) -> Result<f64> {
    let (x, y) = (sample.x(), sample.y());
    if is_constant(x) {
        return Err(Error::DegenerateInput("x is constant".into()));
    }
    if is_constant(y) {
        return Err(Error::DegenerateInput("y is constant".into()));
    }
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).abs().min(1.0))
}

/// Row sums `Σ_j |v_i - v_j|` for every `i`, in O(n log n).
fn abs_diff_row_sums(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| v[a].total_cmp(&v[b]));
    let total: f64 = v.iter().sum();
    let mut sums = vec![0.0; n];
    let mut below = 0.0;
    for (k, &i) in order.iter().enumerate() {
        let k_f = k as f64;
        let above = total - below - v[i];
        sums[i] = (k_f * v[i] - below) + (above - (n as f64 - k_f - 1.0) * v[i]);
        below += v[i];
    }
    sums
}

/// Squared V-statistic distance covariance from the pairwise sum
/// `Σ_ij a_ij b_ij` and the row sums of each distance matrix.
///
/// Double-centering never has to be materialized:
/// `Σ A_ij B_ij = Σ a_ij b_ij - (2/n) Σ_i a_i· b_i· + a·· b·· / n²`.
fn centered_product(cross: f64, ra: &[f64], rb: &[f64]) -> f64 {
    let n = ra.len() as f64;
    let ta: f64 = ra.iter().sum();
    let tb: f64 = rb.iter().sum();
    let rows: f64 = ra.iter().zip(rb).map(|(a, b)| a * b).sum();
    (cross - 2.0 * rows / n + ta * tb / (n * n)) / (n * n)
}

fn pairwise_cross(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mut s = 0.0;
    for i in 0..n {
        let (xi, yi) = (x[i], y[i]);
        let mut row = 0.0;
        for j in (i + 1)..n {
            row += (xi - x[j]).abs() * (yi - y[j]).abs();
        }
        s += row;
    }
    2.0 * s
}

/// Empirical distance correlation (biased V-statistic, Székely et al.),
/// in `[0, 1]`.
///
/// Quadratic in `n`: the cross term `Σ_ij |x_i - x_j||y_i - y_j|` is a full
/// pairwise pass. The row sums of each distance matrix are computed by
/// sorting.
pub fn dcor_score(sample: &Sample<'_>) -> Result<f64> {
    let (x, y) = (sample.x(), sample.y());
    if is_constant(x) {
        return Err(Error::DegenerateInput("x is constant".into()));
    }
    if is_constant(y) {
        return Err(Error::DegenerateInput("y is constant".into()));
    }
    let rx = abs_diff_row_sums(x);
    let ry = abs_diff_row_sums(y);
    let dcov_xy = centered_product(pairwise_cross(x, y), &rx, &ry);
    let dvar_x = centered_product(pairwise_cross(x, x), &rx, &rx);
    let dvar_y = centered_product(pairwise_cross(y, y), &ry, &ry);
    let denom = (dvar_x * dvar_y).sqrt();
    if denom <= 0.0 {
        return Err(Error::DegenerateInput("zero distance variance".into()));
    }
    Ok((dcov_xy.max(0.0) / denom).sqrt().min(1.0))
}

/// Ingredients of the point-biserial coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointBiserialParts {
    pub mean1: f64,
    pub mean0: f64,
    /// Sample standard deviation of `x`, divisor `n - 1`.
    pub s_x: f64,
    pub p0: f64,
    pub p1: f64,
    pub n: usize,
}

impl PointBiserialParts {
    pub fn from_sample(sample: &Sample<'_>) -> Result<Self> {
        let (x, y) = (sample.x(), sample.y());
        let (n0, n1) = binary_classes(y)?;
        let n = x.len();
        let (mut sum0, mut sum1) = (0.0, 0.0);
        for (&a, &b) in x.iter().zip(y) {
            if b == 1.0 {
                sum1 += a;
            } else {
                sum0 += a;
            }
        }
        let m = mean(x);
        let ss: f64 = x.iter().map(|a| (a - m) * (a - m)).sum();
        Ok(PointBiserialParts {
            mean1: sum1 / n1 as f64,
            mean0: sum0 / n0 as f64,
            s_x: (ss / (n as f64 - 1.0)).sqrt(),
            p0: n0 as f64 / n as f64,
            p1: n1 as f64 / n as f64,
            n,
        })
    }

    /// `r_pb = ((x̄1 - x̄0) / S_x) · sqrt(n p0 p1 / (n - 1))`
    pub fn coefficient(&self) -> f64 {
        let n = self.n as f64;
        (self.mean1 - self.mean0) / self.s_x * (n * self.p0 * self.p1 / (n - 1.0)).sqrt()
    }
}

/// Point-biserial correlation of `x` with a {0,1} response, in `[-1, 1]`.
pub fn point_biserial(sample: &Sample<'_>) -> Result<f64> {
    let parts = PointBiserialParts::from_sample(sample)?;
    if parts.s_x == 0.0 {
        return Err(Error::DegenerateInput("x is constant".into()));
    }
    Ok(parts.coefficient().clamp(-1.0, 1.0))
}
