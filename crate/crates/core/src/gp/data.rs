use serde::{Deserialize, Serialize};

use super::GpError;

/// Coordinate-wise tolerance under which two points count as the same.
pub const DUPLICATE_TOL: f64 = 1e-9;

/// Axis-aligned box, one `(lo, hi)` pair per input dimension with `lo < hi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds(Vec<(f64, f64)>);

impl Bounds {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self, GpError> {
        if pairs.is_empty() {
            return Err(GpError::InvalidBounds("no dimensions".into()));
        }
        for (i, &(lo, hi)) in pairs.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(GpError::InvalidBounds(format!("dimension {i}: [{lo}, {hi}]")));
            }
        }
        Ok(Bounds(pairs))
    }

    pub fn uniform(dims: usize, lo: f64, hi: f64) -> Result<Self, GpError> {
        Bounds::new(vec![(lo, hi); dims])
    }

    pub fn dims(&self) -> usize {
        self.0.len()
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.0
    }

    pub fn lo(&self, dim: usize) -> f64 {
        self.0[dim].0
    }

    pub fn hi(&self, dim: usize) -> f64 {
        self.0[dim].1
    }

    pub fn width(&self, dim: usize) -> f64 {
        self.0[dim].1 - self.0[dim].0
    }

    pub fn center(&self) -> Vec<f64> {
        self.0.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect()
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dims() && point.iter().zip(&self.0).all(|(&x, &(lo, hi))| x >= lo && x <= hi)
    }

    pub fn clamp(&self, point: &mut [f64]) {
        for (x, &(lo, hi)) in point.iter_mut().zip(&self.0) {
            *x = x.clamp(lo, hi);
        }
    }
}

/// True when every coordinate differs by at most [`DUPLICATE_TOL`].
pub fn same_point(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= DUPLICATE_TOL)
}

/// Labeled input rows together with the sampling box they were drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSet {
    rows: Vec<Vec<f64>>,
    labels: Vec<f64>,
    bounds: Bounds,
}

impl TrainingSet {
    pub fn new(bounds: Bounds) -> Self {
        TrainingSet { rows: Vec::new(), labels: Vec::new(), bounds }
    }

    pub fn from_rows(bounds: Bounds, rows: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self, GpError> {
        if rows.len() != labels.len() {
            return Err(GpError::LengthMismatch { rows: rows.len(), labels: labels.len() });
        }
        let mut set = TrainingSet::new(bounds);
        for (row, label) in rows.into_iter().zip(labels) {
            set.push(row, label)?;
        }
        Ok(set)
    }

    /// Appends a row, clamping it into the bounds first.
    pub fn push(&mut self, mut row: Vec<f64>, label: f64) -> Result<(), GpError> {
        if row.len() != self.dims() {
            return Err(GpError::DimensionMismatch { expected: self.dims(), got: row.len() });
        }
        self.bounds.clamp(&mut row);
        self.rows.push(row);
        self.labels.push(label);
        Ok(())
    }

    pub fn dims(&self) -> usize {
        self.bounds.dims()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn contains_point(&self, point: &[f64]) -> bool {
        self.rows.iter().any(|r| same_point(r, point))
    }

    pub fn columns(&self) -> Columns {
        Columns::from_rows(&self.rows, self.dims())
    }

    /// Restricts the set to the given row indices (bounds are kept).
    pub fn subset(&self, indices: &[usize]) -> TrainingSet {
        TrainingSet {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            bounds: self.bounds.clone(),
        }
    }
}

/// Column-major copy of a set of input rows, the layout model evaluation
/// works on.
#[derive(Debug, Clone, PartialEq)]
pub struct Columns {
    cols: Vec<Vec<f64>>,
    len: usize,
}

impl Columns {
    pub fn from_rows(rows: &[Vec<f64>], dims: usize) -> Self {
        let mut cols = vec![Vec::with_capacity(rows.len()); dims];
        for row in rows {
            for (c, &x) in cols.iter_mut().zip(row) {
                c.push(x);
            }
        }
        Columns { cols, len: rows.len() }
    }

    pub fn single(point: &[f64]) -> Self {
        Columns { cols: point.iter().map(|&x| vec![x]).collect(), len: 1 }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dims(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, dim: usize) -> &[f64] {
        &self.cols[dim]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_clamps_into_bounds() {
        let mut set = TrainingSet::new(Bounds::uniform(2, 0.0, 6.0).unwrap());
        set.push(vec![7.2, -1.0], 1.0).unwrap();
        assert_eq!(set.rows()[0], vec![6.0, 0.0]);
        assert!(set.push(vec![1.0], 0.0).is_err());
    }

    #[test]
    fn bounds_reject_degenerate_boxes() {
        assert!(Bounds::new(vec![(1.0, 1.0)]).is_err());
        assert!(Bounds::new(vec![(2.0, 1.0)]).is_err());
        assert!(Bounds::new(vec![]).is_err());
        assert!(Bounds::new(vec![(0.0, f64::INFINITY)]).is_err());
    }

    #[test]
    fn columns_transpose_rows() {
        let cols = Columns::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]], 2);
        assert_eq!(cols.len(), 3);
        assert_eq!(cols.column(0), &[1.0, 3.0, 5.0]);
        assert_eq!(cols.column(1), &[2.0, 4.0, 6.0]);
    }

    #[test]
    fn duplicate_detection_uses_tolerance() {
        let mut set = TrainingSet::new(Bounds::uniform(1, 0.0, 1.0).unwrap());
        set.push(vec![0.5], 0.0).unwrap();
        assert!(set.contains_point(&[0.5 + 1e-10]));
        assert!(!set.contains_point(&[0.5 + 1e-8]));
    }
}
