use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UncertaintyKind {
    StdOverMean,
    TrimmedStdOverTrimmedMean,
    StdOverTrimmedMean,
    Std,
    DifferentialEntropy,
}

/// An ensemble-disagreement measure. Larger means more uncertain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyMetric {
    pub kind: UncertaintyKind,
    /// Fraction dropped from each tail by the trimmed statistics.
    pub trim: f64,
}

impl UncertaintyMetric {
    pub fn new(kind: UncertaintyKind) -> Self {
        UncertaintyMetric { kind, trim: 0.3 }
    }

    /// Applies the metric to a set of ensemble responses. Non-finite
    /// responses are ignored; fewer than two finite ones, or a non-finite
    /// result, give `-inf`.
    pub fn score(&self, responses: &[f64]) -> f64 {
        let mut v: Vec<f64> = responses.iter().copied().filter(|x| x.is_finite()).collect();
        if v.len() < 2 {
            return f64::NEG_INFINITY;
        }
        let abs: Vec<f64> = v.iter().map(|x| x.abs()).collect();
        let out = match self.kind {
            UncertaintyKind::StdOverMean => std_dev(&v) / mean(&abs),
            UncertaintyKind::TrimmedStdOverTrimmedMean => {
                std_dev(trimmed(&mut v, self.trim)) / mean(trimmed(&mut abs.clone(), self.trim))
            }
            UncertaintyKind::StdOverTrimmedMean => std_dev(&v) / mean(trimmed(&mut abs.clone(), self.trim)),
            UncertaintyKind::Std => std_dev(&v),
            UncertaintyKind::DifferentialEntropy => vasicek_entropy(&v),
        };
        if out.is_finite() {
            out
        } else {
            f64::NEG_INFINITY
        }
    }
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample standard deviation (n - 1 denominator).
pub fn std_dev(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    // Shifting by the first value makes equal samples give exactly zero.
    let x0 = v[0];
    let m = v.iter().map(|x| x - x0).sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - x0 - m) * (x - x0 - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

/// Sorts `v` and returns it with `floor(trim * n)` values cut from each end.
pub fn trimmed(v: &mut [f64], trim: f64) -> &[f64] {
    v.sort_by(f64::total_cmp);
    let cut = (trim * v.len() as f64).floor() as usize;
    &v[cut..v.len() - cut]
}

/// Vasicek spacing estimate of differential entropy with window
/// `m = floor(sqrt(n))`. Zero spacings (tied responses) are floored at the
/// smallest positive normal float so partial ties stay finite.
pub fn vasicek_entropy(sample: &[f64]) -> f64 {
    let n = sample.len();
    if n < 2 {
        return f64::NEG_INFINITY;
    }
    let mut x = sample.to_vec();
    x.sort_by(f64::total_cmp);
    let m = ((n as f64).sqrt().floor() as usize).clamp(1, n - 1);
    let scale = n as f64 / (2.0 * m as f64);
    let total: f64 = (0..n)
        .map(|i| {
            let hi = x[(i + m).min(n - 1)];
            let lo = x[i.saturating_sub(m)];
            (scale * (hi - lo)).max(f64::MIN_POSITIVE).ln()
        })
        .sum();
    total / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal, Uniform};

    #[test]
    fn std_examples() {
        let m = UncertaintyMetric::new(UncertaintyKind::Std);
        assert_eq!(m.score(&[4.0, 4.0, 4.0]), 0.0);
        assert!((m.score(&[0.0, 2.0]) - 2f64.sqrt()).abs() < 1e-12);
        let rel = UncertaintyMetric::new(UncertaintyKind::StdOverMean);
        assert!((rel.score(&[1.0, 3.0]) - 2f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs_give_sentinel() {
        let m = UncertaintyMetric::new(UncertaintyKind::Std);
        assert_eq!(m.score(&[1.0, f64::NAN]), f64::NEG_INFINITY);
        assert_eq!(m.score(&[]), f64::NEG_INFINITY);
        assert!((m.score(&[1.0, f64::INFINITY, 3.0]) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn trimming_drops_each_tail() {
        let mut v = vec![9.0, 1.0, 5.0, 3.0, 7.0, 100.0, -50.0, 4.0, 6.0, 2.0];
        assert_eq!(trimmed(&mut v, 0.3), &[3.0, 4.0, 5.0, 6.0]);
    }

    #[test]
    fn entropy_of_unit_normal() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let s: Vec<f64> = (0..1000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let h = vasicek_entropy(&s);
        assert!((h - 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln()).abs() < 0.1, "{h}");
    }

    #[test]
    fn entropy_of_unit_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let u = Uniform::new(0.0, 1.0).unwrap();
        let s: Vec<f64> = (0..10_000).map(|_| u.sample(&mut rng)).collect();
        assert!(vasicek_entropy(&s).abs() < 0.05);
    }
}
