//! Stack-based genetic programming: model representation, evaluation,
//! variation and the generational search loop.

mod data;
mod evolve;
mod model;
mod operator;
mod variation;

pub use data::{same_point, Bounds, Columns, TrainingSet, DUPLICATE_TOL};
pub use evolve::{evolve, non_dominated, pareto_layers, tournament_select, EvolutionParams};
pub use model::{correlation_error, least_squares_line, Replay, StackModel, Terminal};
pub use operator::{Operator, OperatorSet};
pub use variation::{
    crossover, crossover_at, mutate, mutate_traced, mutate_with, repair, trim, MutationForm, Primitives,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GpError {
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("operator set must contain at least one arithmetic operator")]
    EmptyOperatorSet,
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
    #[error("{rows} rows but {labels} labels")]
    LengthMismatch { rows: usize, labels: usize },
    #[error("expected {expected} inputs, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid evolution parameters: {0}")]
    InvalidParams(String),
}
