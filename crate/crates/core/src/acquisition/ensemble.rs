use rand::Rng;

use super::kmeans::kmeans;
use super::UncertaintyMetric;
use crate::gp::{StackModel, TrainingSet};

/// A committee of structurally distinct models.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub models: Vec<StackModel>,
}

impl Ensemble {
    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// Aligned prediction of every member at `point`.
    pub fn responses(&self, point: &[f64]) -> Vec<f64> {
        self.models.iter().map(|m| m.predict(point)).collect()
    }

    pub fn uncertainty(&self, metric: &UncertaintyMetric, point: &[f64]) -> f64 {
        metric.score(&self.responses(point))
    }
}

pub const MAX_ENSEMBLE: usize = 10;

fn rmse(pred: &[f64], labels: &[f64], rows: &[usize]) -> f64 {
    let mut s = 0.0;
    for &i in rows {
        let e = pred[i] - labels[i];
        s += e * e;
    }
    let v = (s / rows.len() as f64).sqrt();
    if v.is_finite() {
        v
    } else {
        f64::INFINITY
    }
}

/// Clusters the training rows into `min(|data|, 10)` groups and, cluster by
/// cluster, adds the model with the lowest RMSE on that cluster that is not
/// already in the ensemble.
pub fn ensemble_select<R: Rng + ?Sized>(models: &[StackModel], data: &TrainingSet, rng: &mut R) -> Ensemble {
    let k = data.len().min(MAX_ENSEMBLE);
    let clusters = kmeans(data.rows(), k, 50, rng);
    ensemble_from_clusters(models, data, &clusters)
}

/// The per-cluster selection step for a given partition of the rows.
pub fn ensemble_from_clusters(models: &[StackModel], data: &TrainingSet, clusters: &[Vec<usize>]) -> Ensemble {
    let cols = data.columns();
    let preds: Vec<Vec<f64>> = models.iter().map(|m| m.predict_columns(&cols)).collect();
    let mut chosen: Vec<usize> = Vec::new();
    for cluster in clusters {
        let mut ranked: Vec<(f64, usize)> =
            (0..models.len()).map(|j| (rmse(&preds[j], data.labels(), cluster), j)).collect();
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        if let Some(&(_, j)) = ranked.iter().find(|(_, j)| !chosen.iter().any(|&c| models[c] == models[*j])) {
            chosen.push(j);
        }
    }
    Ensemble { models: chosen.into_iter().map(|j| models[j].clone()).collect() }
}
