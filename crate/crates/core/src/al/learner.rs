use rand::Rng;
use serde::{Deserialize, Serialize};

use super::labeler::Labeler;
use super::sampling::{sample_normal, sample_uniform};
use super::strategy::AcquisitionStrategy;
use super::AlError;
use crate::acquisition::{ensemble_select, pareto_front, pick_median, DiversityMetric, Ensemble, UncertaintyMetric};
use crate::bench::ProblemSpec;
use crate::gp::{
    correlation_error, evolve, pareto_layers, Bounds, Columns, EvolutionParams, StackModel, TrainingSet,
};
use crate::optim::{subregion_retry, BoundedObjective};

pub const INITIAL_POINTS: usize = 3;
/// Minimum number of models (taken by Pareto layers) offered to ensemble selection.
pub const ENSEMBLE_POOL: usize = 20;
/// Share of the previous population carried into the next search as seeds.
pub const SEED_FRACTION: f64 = 0.1;
pub const VALIDATION_POINTS: usize = 1000;
const QUICK_CHECK_POINTS: usize = 50;
const SOLVED_TRAINING_ERROR: f64 = 1e-8;
const MAX_SOLUTION_CHECKS: usize = 200;

/// A chosen point plus the scores that justified it.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub point: Vec<f64>,
    pub uncertainty: Option<f64>,
    pub diversity: Option<f64>,
    pub ensemble_size: Option<usize>,
}

impl Selection {
    fn plain(point: Vec<f64>) -> Self {
        Selection { point, uncertainty: None, diversity: None, ensemble_size: None }
    }
}

/// Training data and current model population for one learning run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Learner {
    pub strategy: AcquisitionStrategy,
    pub params: EvolutionParams,
    pub data: TrainingSet,
    pub population: Vec<StackModel>,
}

fn unique_draw<R, F>(taken: &[Vec<f64>], rng: &mut R, mut draw: F) -> Vec<f64>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> Vec<f64>,
{
    loop {
        let x = draw(rng);
        if !taken.iter().any(|t| crate::gp::same_point(t, &x)) {
            return x;
        }
    }
}

impl Learner {
    pub fn new(strategy: AcquisitionStrategy, params: EvolutionParams, bounds: Bounds) -> Self {
        Learner { strategy, params, data: TrainingSet::new(bounds), population: Vec::new() }
    }

    pub fn bounds(&self) -> &Bounds {
        self.data.bounds()
    }

    /// Three distinct uniform points to start from.
    pub fn initial_points<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Vec<f64>> {
        let mut pts: Vec<Vec<f64>> = self.data.rows().to_vec();
        let start = pts.len();
        for _ in 0..INITIAL_POINTS {
            let x = unique_draw(&pts, rng, |r| sample_uniform(self.bounds(), r));
            pts.push(x);
        }
        pts.split_off(start)
    }

    pub fn add(&mut self, point: Vec<f64>, label: f64) -> Result<(), AlError> {
        self.data.push(point, label).map_err(AlError::Gp)
    }

    /// Re-runs the search on the current data, seeded with the best share of
    /// the previous population and any `extra` models.
    pub fn refit<R: Rng + ?Sized>(&mut self, extra: &[StackModel], rng: &mut R) {
        let keep = (SEED_FRACTION * self.population.len() as f64).ceil() as usize;
        let mut seeds: Vec<StackModel> = extra.to_vec();
        seeds.extend(self.population.iter().take(keep).cloned());
        self.population = evolve(&self.data, &seeds, &self.params, rng);
    }

    pub fn best(&self) -> Option<&StackModel> {
        self.population.first()
    }

    pub fn best_error(&self) -> f64 {
        self.best().and_then(|m| m.fitness).unwrap_or(1.0)
    }

    pub fn ensemble<R: Rng + ?Sized>(&self, rng: &mut R) -> Ensemble {
        let pool: Vec<StackModel> =
            pareto_layers(&self.population, ENSEMBLE_POOL).into_iter().map(|i| self.population[i].clone()).collect();
        ensemble_select(&pool, &self.data, rng)
    }

    fn fresh_cloud<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<Vec<f64>> {
        (0..n.max(1)).map(|_| unique_draw(self.data.rows(), rng, |r| sample_uniform(self.bounds(), r))).collect()
    }

    /// Chooses the next point to label according to the strategy. The point
    /// never coincides with an existing training row.
    pub fn select<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Selection, AlError> {
        let rows = self.data.rows();
        match &self.strategy {
            AcquisitionStrategy::Uniform => Ok(Selection::plain(unique_draw(rows, rng, |r| sample_uniform(self.bounds(), r)))),
            AcquisitionStrategy::Normal => Ok(Selection::plain(unique_draw(rows, rng, |r| sample_normal(self.bounds(), r)))),
            AcquisitionStrategy::Uncertainty { metric, optimizer } => {
                let ens = self.ensemble(rng);
                let obj = BoundedObjective::new(|x: &[f64]| ens.uncertainty(metric, x), self.bounds().clone());
                let point = subregion_retry(&obj, *optimizer, rows, rng);
                let u = obj.value(&point);
                Ok(Selection { point, uncertainty: Some(u), diversity: None, ensemble_size: Some(ens.len()) })
            }
            AcquisitionStrategy::Diversity { metric, candidates } => {
                let cloud = self.fresh_cloud(*candidates, rng);
                let mut best = (f64::NEG_INFINITY, 0);
                for (i, c) in cloud.iter().enumerate() {
                    let s = metric.score(rows, c)?;
                    if s > best.0 || i == 0 {
                        best = (s, i);
                    }
                }
                let mut sel = Selection::plain(cloud[best.1].clone());
                sel.diversity = Some(best.0);
                Ok(sel)
            }
            AcquisitionStrategy::Pareto { candidates, uncertainty, diversity } => {
                let ens = self.ensemble(rng);
                let cloud = self.fresh_cloud(*candidates, rng);
                let scores = pareto_scores(&ens, uncertainty, *diversity, rows, &cloud)?;
                let front = pareto_front(&scores);
                let pick = front[pick_median(front.len())];
                Ok(Selection {
                    point: cloud[pick].clone(),
                    uncertainty: Some(scores[pick].0),
                    diversity: Some(scores[pick].1),
                    ensemble_size: Some(ens.len()),
                })
            }
        }
    }
}

/// (uncertainty, diversity) of every candidate, both maximize-oriented.
pub fn pareto_scores(
    ens: &Ensemble,
    uncertainty: &UncertaintyMetric,
    diversity: DiversityMetric,
    rows: &[Vec<f64>],
    cloud: &[Vec<f64>],
) -> Result<Vec<(f64, f64)>, AlError> {
    let cols = Columns::from_rows(cloud, rows.first().map_or(0, Vec::len));
    let preds: Vec<Vec<f64>> = ens.models.iter().map(|m| m.predict_columns(&cols)).collect();
    let mut responses = vec![0.0; preds.len()];
    cloud
        .iter()
        .enumerate()
        .map(|(i, c)| {
            for (r, p) in responses.iter_mut().zip(&preds) {
                *r = p[i];
            }
            let u = uncertainty.score(&responses);
            let d = diversity.score(rows, c)?;
            Ok((u, d))
        })
        .collect()
}

/// Fixed held-out grid for deciding whether a model reproduces the target.
pub struct Validator {
    cols: Columns,
    labels: Vec<f64>,
    quick_cols: Columns,
    quick_labels: Vec<f64>,
    range: f64,
}

impl Validator {
    pub fn new<R: Rng + ?Sized>(problem: &ProblemSpec, rng: &mut R) -> Self {
        let rows: Vec<Vec<f64>> = (0..VALIDATION_POINTS).map(|_| sample_uniform(&problem.bounds, rng)).collect();
        let labels: Vec<f64> = rows.iter().map(|r| problem.label(r)).collect();
        Validator::from_rows(rows, labels)
    }

    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Vec<f64>) -> Self {
        let dims = rows.first().map_or(0, Vec::len);
        let q = QUICK_CHECK_POINTS.min(rows.len());
        let lo = labels.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = labels.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Validator {
            quick_cols: Columns::from_rows(&rows[..q], dims),
            quick_labels: labels[..q].to_vec(),
            cols: Columns::from_rows(&rows, dims),
            labels,
            range: if hi > lo { hi - lo } else { 0.0 },
        }
    }

    fn passes(&self, model: &StackModel, cols: &Columns, labels: &[f64]) -> bool {
        let pred = model.predict_columns(cols);
        if self.range <= 0.0 || correlation_error(&pred, labels) > 1e-8 {
            return false;
        }
        let tol = 1e-6 * self.range;
        pred.iter().zip(labels).all(|(p, y)| (p - y).abs() <= tol)
    }

    /// Aligned predictions match the grid: `1 - R^2 <= 1e-8` and every
    /// residual within `1e-6` of the label range.
    pub fn accepts(&self, model: &StackModel) -> bool {
        self.passes(model, &self.quick_cols, &self.quick_labels) && self.passes(model, &self.cols, &self.labels)
    }

    /// The simplest model with near-zero training error that validates.
    pub fn find_solution<'a>(&self, population: &'a [StackModel]) -> Option<&'a StackModel> {
        let mut fits: Vec<&StackModel> =
            population.iter().filter(|m| m.fitness.is_some_and(|f| f <= SOLVED_TRAINING_ERROR)).collect();
        fits.sort_by_key(|m| m.complexity());
        fits.into_iter().take(MAX_SOLUTION_CHECKS).find(|m| self.accepts(m))
    }
}

pub fn solved(best: &StackModel, validator: &Validator) -> bool {
    validator.accepts(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub iteration: usize,
    pub point: Vec<f64>,
    pub label: f64,
    pub uncertainty: Option<f64>,
    pub diversity: Option<f64>,
    pub ensemble_size: Option<usize>,
    pub best_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub points_used: usize,
    pub solved: bool,
    pub aborted: bool,
    pub solution: Option<String>,
    pub error: Option<String>,
    pub log: Vec<IterationLog>,
}

pub fn run_al<R: Rng + ?Sized>(
    problem: &ProblemSpec,
    strategy: &AcquisitionStrategy,
    params: &EvolutionParams,
    labeler: &mut dyn Labeler,
    rng: &mut R,
) -> TrialResult {
    run_al_seeded(problem, strategy, params, labeler, &[], rng)
}

/// Like [`run_al`], with extra models injected into the first search.
pub fn run_al_seeded<R: Rng + ?Sized>(
    problem: &ProblemSpec,
    strategy: &AcquisitionStrategy,
    params: &EvolutionParams,
    labeler: &mut dyn Labeler,
    seeds: &[StackModel],
    rng: &mut R,
) -> TrialResult {
    let validator = Validator::new(problem, rng);
    let max_points = problem.max_points.max(INITIAL_POINTS);
    let mut learner = Learner::new(strategy.clone(), params.clone(), problem.bounds.clone());
    let mut log = Vec::new();
    let finish = |learner: &Learner, log: Vec<IterationLog>, solution: Option<&StackModel>, err: Option<AlError>| {
        TrialResult {
            points_used: learner.data.len(),
            solved: solution.is_some(),
            aborted: err.is_some(),
            solution: solution.map(|m| m.expression(Some(&problem.names))),
            error: err.map(|e| e.to_string()),
            log,
        }
    };

    let mut pending = Vec::new();
    for point in learner.initial_points(rng) {
        let index = learner.data.len();
        match labeler.label(index, &point).and_then(|y| learner.add(point.clone(), y).map(|_| y)) {
            Ok(y) => pending.push((point, y)),
            Err(e) => return finish(&learner, log, None, Some(e)),
        }
    }
    learner.refit(seeds, rng);
    for (point, label) in pending {
        log.push(IterationLog {
            iteration: 0,
            point,
            label,
            uncertainty: None,
            diversity: None,
            ensemble_size: None,
            best_error: learner.best_error(),
        });
    }

    let mut iteration = 0;
    loop {
        if let Some(m) = validator.find_solution(&learner.population) {
            return finish(&learner, log, Some(m), None);
        }
        if learner.data.len() >= max_points {
            return finish(&learner, log, None, None);
        }
        iteration += 1;
        let sel = match learner.select(rng) {
            Ok(s) => s,
            Err(e) => return finish(&learner, log, None, Some(e)),
        };
        let index = learner.data.len();
        let label = match labeler.label(index, &sel.point) {
            Ok(y) => y,
            Err(e) => return finish(&learner, log, None, Some(e)),
        };
        if let Err(e) = learner.add(sel.point.clone(), label) {
            return finish(&learner, log, None, Some(e));
        }
        learner.refit(&[], rng);
        log.push(IterationLog {
            iteration,
            point: sel.point,
            label,
            uncertainty: sel.uncertainty,
            diversity: sel.diversity,
            ensemble_size: sel.ensemble_size,
            best_error: learner.best_error(),
        });
    }
}
