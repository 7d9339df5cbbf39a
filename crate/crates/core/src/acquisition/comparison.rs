use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{AcquisitionError, DiversityMetric};
use crate::gp::{Bounds, TrainingSet};
use crate::optim::random_point;

/// Largest dimension for which every box corner joins a candidate cloud.
const MAX_CORNER_DIMS: usize = 12;

/// All corners of the box (when `D` is small enough) followed by `n`
/// uniform points.
pub fn candidate_cloud<R: Rng + ?Sized>(bounds: &Bounds, n: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let d = bounds.dims();
    let mut out = Vec::with_capacity(n + if d <= MAX_CORNER_DIMS { 1 << d } else { 0 });
    if d <= MAX_CORNER_DIMS {
        for mask in 0..(1usize << d) {
            out.push((0..d).map(|i| if mask >> i & 1 == 1 { bounds.hi(i) } else { bounds.lo(i) }).collect());
        }
    }
    out.extend((0..n).map(|_| random_point(bounds, rng)));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub iteration: usize,
    pub min_dist: f64,
    pub mean_dist: f64,
    /// `NaN` when the problem has fewer than three inputs.
    pub joint_corr: f64,
}

/// Greedily adds `n_iter` points, each the best candidate under `selector`
/// from a fresh cloud of `cloud_size` points, and records all three
/// diversity metrics of every chosen point against the set before it joins.
pub fn metric_comparison<R: Rng + ?Sized>(
    data: &TrainingSet,
    selector: DiversityMetric,
    n_iter: usize,
    cloud_size: usize,
    rng: &mut R,
) -> Result<Vec<MetricRow>, AcquisitionError> {
    let bounds = data.bounds();
    if selector == DiversityMetric::JointCorrelation && bounds.dims() < 3 {
        return Err(AcquisitionError::TooFewDimensions(bounds.dims()));
    }
    if data.is_empty() {
        return Err(AcquisitionError::EmptyData);
    }
    let mut rows: Vec<Vec<f64>> = data.rows().to_vec();
    let mut table = Vec::with_capacity(n_iter);
    for iteration in 0..n_iter {
        let cloud = candidate_cloud(bounds, cloud_size, rng);
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, c) in cloud.iter().enumerate() {
            let s = selector.score(&rows, c)?;
            if s > best.0 {
                best = (s, i);
            }
        }
        let point = cloud[best.1].clone();
        let joint_corr = if bounds.dims() >= 3 {
            DiversityMetric::JointCorrelation.value(&rows, &point)?
        } else {
            f64::NAN
        };
        table.push(MetricRow {
            iteration,
            min_dist: DiversityMetric::MinDistance.value(&rows, &point)?,
            mean_dist: DiversityMetric::MeanDistance.value(&rows, &point)?,
            joint_corr,
        });
        rows.push(point);
    }
    Ok(table)
}
