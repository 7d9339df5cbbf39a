use serde::{Deserialize, Serialize};

use super::AcquisitionError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiversityMetric {
    MinDistance,
    MeanDistance,
    JointCorrelation,
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Squared Pearson correlation of two equal-length vectors; a constant vector
/// counts as fully redundant (1.0).
pub fn pair_r2(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return 1.0;
    }
    (sab * sab / (saa * sbb)).min(1.0)
}

impl DiversityMetric {
    /// The raw metric of `point` against `rows`.
    pub fn value(self, rows: &[Vec<f64>], point: &[f64]) -> Result<f64, AcquisitionError> {
        if rows.is_empty() {
            return Err(AcquisitionError::EmptyData);
        }
        Ok(match self {
            DiversityMetric::MinDistance => rows.iter().map(|r| distance(r, point)).fold(f64::INFINITY, f64::min),
            DiversityMetric::MeanDistance => rows.iter().map(|r| distance(r, point)).sum::<f64>() / rows.len() as f64,
            DiversityMetric::JointCorrelation => {
                if point.len() < 3 {
                    return Err(AcquisitionError::TooFewDimensions(point.len()));
                }
                rows.iter().map(|r| pair_r2(r, point)).sum::<f64>() / rows.len() as f64
            }
        })
    }

    /// Maximize-oriented score: distances as is, correlation negated.
    pub fn score(self, rows: &[Vec<f64>], point: &[f64]) -> Result<f64, AcquisitionError> {
        let v = self.value(rows, point)?;
        Ok(if self == DiversityMetric::JointCorrelation { -v } else { v })
    }
}
