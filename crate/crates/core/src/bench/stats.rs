//! Rank statistics and correlations for comparing strategies.

use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("samples must be non-empty")]
    Empty,
    #[error("samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least two paired values")]
    TooShort,
    #[error("zero variance: correlation undefined")]
    ZeroVariance,
}

/// Median; the mean of the two middle values for even counts.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// 1-based ranks with ties sharing their average rank.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney {
    /// U statistic of the first sample.
    pub u: f64,
    /// Two-sided p-value.
    pub p: f64,
    pub exact: bool,
}

fn u_statistic(a: &[f64], b: &[f64]) -> (f64, Vec<f64>) {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = mid_ranks(&pooled);
    let n1 = a.len() as f64;
    let r1: f64 = ranks[..a.len()].iter().sum();
    (r1 - n1 * (n1 + 1.0) / 2.0, pooled)
}

fn has_ties(pooled: &[f64]) -> bool {
    let mut v = pooled.to_vec();
    v.sort_by(f64::total_cmp);
    v.windows(2).any(|w| w[0] == w[1])
}

/// Number of arrangements of `n1` + `n2` untied values giving each U.
fn u_counts(n1: usize, n2: usize) -> Vec<f64> {
    // table[i][j] = counts for sizes (i, j); built up with the recurrence
    // N(i, j; u) = N(i - 1, j; u - j) + N(i, j - 1; u).
    let max_u = n1 * n2;
    let mut table = vec![vec![Vec::<f64>::new(); n2 + 1]; n1 + 1];
    for i in 0..=n1 {
        for j in 0..=n2 {
            let mut c = vec![0.0; i * j + 1];
            if i == 0 || j == 0 {
                c[0] = 1.0;
            } else {
                for (u, slot) in c.iter_mut().enumerate() {
                    let from_i = if u >= j { table[i - 1][j].get(u - j).copied().unwrap_or(0.0) } else { 0.0 };
                    let from_j = table[i][j - 1].get(u).copied().unwrap_or(0.0);
                    *slot = from_i + from_j;
                }
            }
            table[i][j] = c;
        }
    }
    let out = std::mem::take(&mut table[n1][n2]);
    debug_assert_eq!(out.len(), max_u + 1);
    out
}

/// Exact two-sided p-value by enumerating rank arrangements (no ties).
pub fn mann_whitney_exact(a: &[f64], b: &[f64]) -> Result<MannWhitney, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::Empty);
    }
    let (u, _) = u_statistic(a, b);
    let counts = u_counts(a.len(), b.len());
    let total: f64 = counts.iter().sum();
    let k = u.round() as usize;
    let lower: f64 = counts[..=k].iter().sum::<f64>() / total;
    let upper: f64 = counts[k..].iter().sum::<f64>() / total;
    Ok(MannWhitney { u, p: (2.0 * lower.min(upper)).min(1.0), exact: true })
}

/// Normal approximation with tie and continuity corrections.
pub fn mann_whitney_approx(a: &[f64], b: &[f64]) -> Result<MannWhitney, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::Empty);
    }
    let (u, pooled) = u_statistic(a, b);
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let n = n1 + n2;
    let mut sorted = pooled;
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let mean = n1 * n2 / 2.0;
    let var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if var <= 0.0 {
        return Ok(MannWhitney { u, p: 1.0, exact: false });
    }
    let z = ((u - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let p = 2.0 * (1.0 - Normal::standard().cdf(z));
    Ok(MannWhitney { u, p: p.min(1.0), exact: false })
}

/// Mann–Whitney U test: exact for at most 16 untied values, else the
/// corrected normal approximation.
pub fn mann_whitney(a: &[f64], b: &[f64]) -> Result<MannWhitney, StatsError> {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    if pooled.len() <= 16 && !has_ties(&pooled) {
        mann_whitney_exact(a, b)
    } else {
        mann_whitney_approx(a, b)
    }
}

fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::TooShort);
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

pub fn pearson_r2(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    pearson_r(x, y).map(|r| r * r)
}

/// Rank correlation using mid-ranks for ties.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    pearson_r(&mid_ranks(x), &mid_ranks(y))
}
