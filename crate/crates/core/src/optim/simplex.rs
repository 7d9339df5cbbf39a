use super::BoundedObjective;

/// Nelder–Mead descent on `-f`, with every trial vertex clamped into the
/// box. Returns the best point seen, which is never worse than `start`.
pub fn local_minimize<F>(obj: &BoundedObjective<F>, start: &[f64], budget: usize) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let bounds = &obj.bounds;
    let n = bounds.dims();
    let cost = |x: &[f64]| -obj.value(x);
    let clamp = |mut x: Vec<f64>| {
        bounds.clamp(&mut x);
        x
    };

    let mut start = start.to_vec();
    bounds.clamp(&mut start);
    let start_cost = cost(&start);
    let mut best = (start.clone(), start_cost);
    let mut evals = 1;

    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(start.clone(), start_cost)];
    for d in 0..n {
        let step = 0.1 * bounds.width(d);
        let mut v = start.clone();
        v[d] = if v[d] + step <= bounds.hi(d) { v[d] + step } else { v[d] - step };
        let c = cost(&v);
        evals += 1;
        simplex.push((v, c));
    }

    let consider = |x: &Vec<f64>, c: f64, best: &mut (Vec<f64>, f64)| {
        if c < best.1 {
            *best = (x.clone(), c);
        }
    };
    for (x, c) in &simplex {
        consider(x, *c, &mut best);
    }

    while evals < budget {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let size = simplex
            .iter()
            .skip(1)
            .flat_map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if size <= 1e-11 {
            break;
        }

        let centroid: Vec<f64> =
            (0..n).map(|d| simplex[..n].iter().map(|(v, _)| v[d]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> {
            clamp(centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (c - w)).collect())
        };

        let xr = along(1.0);
        let cr = cost(&xr);
        evals += 1;
        consider(&xr, cr, &mut best);
        if cr < simplex[0].1 {
            let xe = along(2.0);
            let ce = cost(&xe);
            evals += 1;
            consider(&xe, ce, &mut best);
            simplex[n] = if ce < cr { (xe, ce) } else { (xr, cr) };
            continue;
        }
        if cr < simplex[n - 1].1 {
            simplex[n] = (xr, cr);
            continue;
        }
        let (xc, cc) = if cr < simplex[n].1 {
            let x = along(0.5);
            let c = cost(&x);
            (x, c)
        } else {
            let x = along(-0.5);
            let c = cost(&x);
            (x, c)
        };
        evals += 1;
        consider(&xc, cc, &mut best);
        if cc < simplex[n].1.min(cr) {
            simplex[n] = (xc, cc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            let x = clamp(anchor.iter().zip(&entry.0).map(|(a, v)| a + 0.5 * (v - a)).collect());
            let c = cost(&x);
            evals += 1;
            consider(&x, c, &mut best);
            *entry = (x, c);
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::Bounds;

    fn parabola() -> BoundedObjective<impl Fn(&[f64]) -> f64> {
        BoundedObjective::new(|x: &[f64]| -(x[0] - 2.0).powi(2), Bounds::uniform(1, 0.0, 5.0).unwrap())
    }

    #[test]
    fn finds_quadratic_peak() {
        let x = local_minimize(&parabola(), &[0.0], 400);
        assert!((x[0] - 2.0).abs() < 1e-4, "{x:?}");
    }

    #[test]
    fn start_on_boundary_moves_inside() {
        let x = local_minimize(&parabola(), &[5.0], 400);
        assert!(x[0] > 0.0 && x[0] < 5.0);
        assert!((x[0] - 2.0).abs() < 1e-4);
    }

    #[test]
    fn constant_objective_returns_start() {
        let obj = BoundedObjective::new(|_: &[f64]| 3.0, Bounds::uniform(2, -1.0, 1.0).unwrap());
        assert_eq!(local_minimize(&obj, &[0.3, -0.2], 400), vec![0.3, -0.2]);
    }

    #[test]
    fn two_dimensional_bowl() {
        let obj = BoundedObjective::new(
            |x: &[f64]| -((x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2)),
            Bounds::uniform(2, -2.0, 2.0).unwrap(),
        );
        let x = local_minimize(&obj, &[0.0, 0.0], 1000);
        assert!((x[0] - 1.0).abs() < 1e-4 && (x[1] + 0.5).abs() < 1e-4, "{x:?}");
    }
}
