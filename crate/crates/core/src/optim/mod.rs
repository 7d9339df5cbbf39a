//! Bounded maximizers used to search the input box for informative points.

mod de;
mod simplex;

pub use de::{differential_evolution, DeParams};
pub use simplex::local_minimize;

use log::warn;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gp::{same_point, Bounds};

/// A function to maximize over a box. NaN values are read as `-inf`.
pub struct BoundedObjective<F> {
    pub f: F,
    pub bounds: Bounds,
}

impl<F: Fn(&[f64]) -> f64> BoundedObjective<F> {
    pub fn new(f: F, bounds: Bounds) -> Self {
        BoundedObjective { f, bounds }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let v = (self.f)(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    }

    /// The same function restricted to a smaller box.
    pub fn restricted(&self, bounds: Bounds) -> BoundedObjective<&F> {
        BoundedObjective { f: &self.f, bounds }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Optimizer {
    /// Simplex descent from the box center with a small jitter.
    Local,
    DifferentialEvolution,
}

impl Optimizer {
    pub fn maximize<F, R>(self, obj: &BoundedObjective<F>, rng: &mut R) -> Vec<f64>
    where
        F: Fn(&[f64]) -> f64,
        R: Rng + ?Sized,
    {
        match self {
            Optimizer::Local => {
                let b = &obj.bounds;
                let mut start = b.center();
                for (d, x) in start.iter_mut().enumerate() {
                    *x += rng.random_range(-0.01..0.01) * b.width(d);
                }
                b.clamp(&mut start);
                local_minimize(obj, &start, 200 * b.dims().max(1))
            }
            Optimizer::DifferentialEvolution => differential_evolution(obj, &DeParams::default(), rng),
        }
    }
}

/// Uniform point in a box.
pub fn random_point<R: Rng + ?Sized>(bounds: &Bounds, rng: &mut R) -> Vec<f64> {
    bounds.pairs().iter().map(|&(lo, hi)| rng.random_range(lo..=hi)).collect()
}

fn is_taken(taken: &[Vec<f64>], x: &[f64]) -> bool {
    taken.iter().any(|t| same_point(t, x))
}

/// Random sub-box whose sides each cover 25–50% of the original side.
pub fn random_subbox<R: Rng + ?Sized>(bounds: &Bounds, rng: &mut R) -> Bounds {
    let pairs = bounds
        .pairs()
        .iter()
        .map(|&(lo, hi)| {
            let w = rng.random_range(0.25..=0.5) * (hi - lo);
            let a = rng.random_range(lo..=hi - w);
            (a, (a + w).min(hi))
        })
        .collect();
    Bounds::new(pairs).expect("sub-box of a valid box is valid")
}

/// Maximizes with `optimizer`; while the optimum coincides with a point in
/// `taken`, re-optimizes inside fresh random sub-boxes. After 100 failed
/// retries falls back to a uniform random point not in `taken`.
pub fn subregion_retry<F, R>(
    obj: &BoundedObjective<F>,
    optimizer: Optimizer,
    taken: &[Vec<f64>],
    rng: &mut R,
) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    let x = optimizer.maximize(obj, rng);
    if !is_taken(taken, &x) {
        return x;
    }
    for _ in 0..100 {
        let sub = obj.restricted(random_subbox(&obj.bounds, rng));
        let x = optimizer.maximize(&sub, rng);
        if !is_taken(taken, &x) {
            return x;
        }
    }
    warn!("sub-region retries exhausted; using a random point");
    loop {
        let x = random_point(&obj.bounds, rng);
        if !is_taken(taken, &x) {
            return x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn retry_without_taken_points_is_plain_optimization() {
        let obj = BoundedObjective::new(|x: &[f64]| -(x[0] - 1.0).powi(2), Bounds::uniform(1, -3.0, 3.0).unwrap());
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(
            subregion_retry(&obj, Optimizer::DifferentialEvolution, &[], &mut a),
            Optimizer::DifferentialEvolution.maximize(&obj, &mut b)
        );
    }

    #[test]
    fn constant_objective_yields_distinct_points() {
        let obj = BoundedObjective::new(|_: &[f64]| 1.0, Bounds::uniform(2, 0.0, 1.0).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for opt in [Optimizer::Local, Optimizer::DifferentialEvolution] {
            let mut taken: Vec<Vec<f64>> = Vec::new();
            for _ in 0..50 {
                let x = subregion_retry(&obj, opt, &taken, &mut rng);
                assert!(!is_taken(&taken, &x));
                assert!(obj.bounds.contains(&x));
                taken.push(x);
            }
        }
    }

    #[test]
    fn subboxes_have_requested_proportions() {
        let b = Bounds::new(vec![(0.0, 4.0), (-1.0, 1.0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let s = random_subbox(&b, &mut rng);
            for d in 0..2 {
                let frac = s.width(d) / b.width(d);
                assert!((0.25 - 1e-12..=0.5 + 1e-12).contains(&frac));
                assert!(s.lo(d) >= b.lo(d) && s.hi(d) <= b.hi(d));
            }
        }
    }
}
