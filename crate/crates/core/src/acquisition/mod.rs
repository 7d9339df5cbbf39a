//! Choosing informative points: ensembles, uncertainty and diversity
//! metrics, and the two-objective combiner.

mod comparison;
mod diversity;
mod ensemble;
mod kmeans;
mod pareto;
mod uncertainty;

pub use comparison::{candidate_cloud, metric_comparison, MetricRow};
pub use diversity::{pair_r2, DiversityMetric};
pub use ensemble::{ensemble_from_clusters, ensemble_select, Ensemble, MAX_ENSEMBLE};
pub use kmeans::kmeans;
pub use pareto::{pareto_front, pick_median};
pub use uncertainty::{mean, std_dev, trimmed, vasicek_entropy, UncertaintyKind, UncertaintyMetric};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AcquisitionError {
    #[error("joint correlation needs at least 3 inputs, problem has {0}")]
    TooFewDimensions(usize),
    #[error("no training rows to compare against")]
    EmptyData,
}
