use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{random_point, BoundedObjective};

/// rand/1/bin settings. Population is `max(per_dim * D, min_population)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeParams {
    pub per_dim: usize,
    pub min_population: usize,
    /// Mutation factor drawn per mutant from this range.
    pub f_range: (f64, f64),
    pub crossover: f64,
    pub generations: usize,
    /// Stop after this many generations without an improvement above 1e-12.
    pub patience: usize,
}

impl Default for DeParams {
    fn default() -> Self {
        DeParams { per_dim: 15, min_population: 20, f_range: (0.5, 1.0), crossover: 0.7, generations: 200, patience: 30 }
    }
}

fn reflect<R: Rng + ?Sized>(v: f64, lo: f64, hi: f64, rng: &mut R) -> f64 {
    let r = if v < lo {
        lo + (lo - v)
    } else if v > hi {
        hi - (v - hi)
    } else {
        v
    };
    if (lo..=hi).contains(&r) {
        r
    } else {
        rng.random_range(lo..=hi)
    }
}

/// Maximizes `obj` by differential evolution and returns the best individual.
pub fn differential_evolution<F, R>(obj: &BoundedObjective<F>, params: &DeParams, rng: &mut R) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    let bounds = &obj.bounds;
    let dims = bounds.dims();
    let np = (params.per_dim * dims).max(params.min_population).max(4);
    let mut pop: Vec<Vec<f64>> = (0..np).map(|_| random_point(bounds, rng)).collect();
    let mut vals: Vec<f64> = pop.iter().map(|x| obj.value(x)).collect();
    let argmax = |vals: &[f64]| (0..vals.len()).fold(0, |b, i| if vals[i] > vals[b] { i } else { b });
    let mut best = argmax(&vals);
    let mut stale = 0;

    for _ in 0..params.generations {
        let before = vals[best];
        for i in 0..np {
            let mut pick = || loop {
                let j = rng.random_range(0..np);
                if j != i {
                    break j;
                }
            };
            let r1 = pick();
            let r2 = loop {
                let j = pick();
                if j != r1 {
                    break j;
                }
            };
            let r3 = loop {
                let j = pick();
                if j != r1 && j != r2 {
                    break j;
                }
            };
            let f = rng.random_range(params.f_range.0..=params.f_range.1);
            let jrand = rng.random_range(0..dims);
            let trial: Vec<f64> = (0..dims)
                .map(|d| {
                    if d == jrand || rng.random::<f64>() < params.crossover {
                        let v = pop[r1][d] + f * (pop[r2][d] - pop[r3][d]);
                        reflect(v, bounds.lo(d), bounds.hi(d), rng)
                    } else {
                        pop[i][d]
                    }
                })
                .collect();
            let tv = obj.value(&trial);
            if tv >= vals[i] {
                pop[i] = trial;
                vals[i] = tv;
                if tv > vals[best] {
                    best = i;
                }
            }
        }
        let gain = vals[best] - before;
        if gain > 1e-12 || (before == f64::NEG_INFINITY && vals[best] > before) {
            stale = 0;
        } else {
            stale += 1;
            if stale >= params.patience {
                break;
            }
        }
    }
    pop.swap_remove(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::Bounds;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn rastrigin(x: &[f64]) -> f64 {
        -(10.0 * x.len() as f64 + x.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos()).sum::<f64>())
    }

    #[test]
    fn sphere_3d() {
        let obj = BoundedObjective::new(|x: &[f64]| -x.iter().map(|v| v * v).sum::<f64>(), Bounds::uniform(3, -5.0, 5.0).unwrap());
        let hits = (0..100)
            .filter(|&s| {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                obj.value(&differential_evolution(&obj, &DeParams::default(), &mut rng)) > -1e-6
            })
            .count();
        assert!(hits >= 95, "{hits}/100");
    }

    #[test]
    fn rastrigin_2d() {
        let obj = BoundedObjective::new(rastrigin, Bounds::uniform(2, -5.12, 5.12).unwrap());
        let hits = (0..100)
            .filter(|&s| {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                obj.value(&differential_evolution(&obj, &DeParams::default(), &mut rng)) > -1.0
            })
            .count();
        assert!(hits >= 95, "{hits}/100");
    }

    #[test]
    fn monotone_objective_hits_upper_bound() {
        let obj = BoundedObjective::new(|x: &[f64]| x[0], Bounds::uniform(1, -2.0, 3.0).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = differential_evolution(&obj, &DeParams::default(), &mut rng);
        assert!((x[0] - 3.0).abs() < 1e-6, "{x:?}");
    }

    #[test]
    fn same_seed_same_result() {
        let obj = BoundedObjective::new(rastrigin, Bounds::uniform(2, -5.12, 5.12).unwrap());
        let run = |s| differential_evolution(&obj, &DeParams::default(), &mut ChaCha8Rng::seed_from_u64(s));
        assert_eq!(run(5), run(5));
    }
}
