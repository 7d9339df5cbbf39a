//! The active-learning loop: pick a point, label it, refit, repeat until the
//! target formula is recovered or the point budget runs out.

mod labeler;
mod learner;
mod sampling;
mod strategy;

pub use labeler::{format_query, InteractiveLabeler, Labeler, OracleLabeler};
pub use learner::{
    pareto_scores, run_al, run_al_seeded, solved, IterationLog, Learner, Selection, TrialResult, Validator,
    ENSEMBLE_POOL, INITIAL_POINTS, SEED_FRACTION, VALIDATION_POINTS,
};
pub use sampling::{sample_normal, sample_normal_raw, sample_uniform};
pub use strategy::{AcquisitionStrategy, DEFAULT_CANDIDATES, STRATEGY_HELP};

use thiserror::Error;

use crate::acquisition::AcquisitionError;
use crate::gp::GpError;

#[derive(Debug, Error)]
pub enum AlError {
    #[error("unknown strategy `{0}`; valid forms: {help}", help = STRATEGY_HELP)]
    UnknownStrategy(String),
    #[error("labeling aborted")]
    Aborted,
    #[error("labeling protocol error: {0}")]
    Protocol(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Gp(#[from] GpError),
    #[error(transparent)]
    Acquisition(#[from] AcquisitionError),
}
