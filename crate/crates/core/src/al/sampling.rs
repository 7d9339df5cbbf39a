use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::gp::Bounds;

/// Independent uniform draw in every dimension.
pub fn sample_uniform<R: Rng + ?Sized>(bounds: &Bounds, rng: &mut R) -> Vec<f64> {
    crate::optim::random_point(bounds, rng)
}

/// Unclamped normal draw centered on the box, sigma = width / 6.
pub fn sample_normal_raw<R: Rng + ?Sized>(bounds: &Bounds, rng: &mut R) -> Vec<f64> {
    bounds
        .pairs()
        .iter()
        .map(|&(lo, hi)| {
            Normal::new(0.5 * (lo + hi), (hi - lo) / 6.0).expect("positive width").sample(rng)
        })
        .collect()
}

/// Normal draw moved onto the boundary when it falls outside.
pub fn sample_normal<R: Rng + ?Sized>(bounds: &Bounds, rng: &mut R) -> Vec<f64> {
    let mut x = sample_normal_raw(bounds, rng);
    bounds.clamp(&mut x);
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_mean_and_reproducibility() {
        let b = Bounds::uniform(1, 0.0, 6.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mean = (0..10_000).map(|_| sample_uniform(&b, &mut rng)[0]).sum::<f64>() / 10_000.0;
        assert!((mean - 3.0).abs() < 0.1);
        let unit = Bounds::uniform(2, 0.0, 1.0).unwrap();
        let a = sample_uniform(&unit, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, sample_uniform(&unit, &mut ChaCha8Rng::seed_from_u64(5)));
        assert!(unit.contains(&a));
    }

    #[test]
    fn normal_parameters_and_tail_mass() {
        let b = Bounds::uniform(1, 0.0, 6.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let raw: Vec<f64> = (0..10_000).map(|_| sample_normal_raw(&b, &mut rng)[0]).collect();
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        let sd = (raw.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (raw.len() - 1) as f64).sqrt();
        assert!((mean - 3.0).abs() < 0.05 && (sd - 1.0).abs() < 0.05);
        let outside = raw.iter().filter(|&&x| !(0.0..=6.0).contains(&x)).count() as f64 / raw.len() as f64;
        assert!((outside - 0.002).abs() <= 0.002, "{outside}");
        for _ in 0..1000 {
            assert!(b.contains(&sample_normal(&b, &mut rng)));
        }
        let mut high = vec![7.2];
        b.clamp(&mut high);
        assert_eq!(high, vec![6.0]);
    }
}
