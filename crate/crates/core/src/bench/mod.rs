//! Problem registry, campaign runner and the statistics used to compare
//! strategies.

mod campaign;
mod expr;
mod problem;
mod stats;

pub use expr::{parse_expression, BinOp, Expr, Func, ParseError};
pub use problem::{load_problems, parse_problems, ProblemError, ProblemSpec, DEFAULT_MAX_POINTS, DEFAULT_RANGE};
pub use campaign::{
    read_trials_csv, run_campaign, run_trial, trial_seed, write_campaign, Campaign, CampaignResult, TrialRecord,
};
pub use stats::{
    median, mann_whitney, mann_whitney_approx, mann_whitney_exact, mid_ranks, pearson_r2, spearman_rho, MannWhitney,
    StatsError,
};
