//! Generational search with Pareto tournaments over (error, complexity).

use std::cmp::Ordering;
use std::collections::HashSet;

use rand::seq::index::sample;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::data::{Columns, TrainingSet};
use super::model::StackModel;
use super::operator::OperatorSet;
use super::variation::{crossover, mutate, Primitives};
use super::GpError;

/// Rates are percentages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionParams {
    pub mutation_rate: f64,
    pub crossover_rate: f64,
    pub spawn_rate: f64,
    pub elitism_rate: f64,
    pub tournament_size: usize,
    pub population_size: usize,
    pub selection_rate: f64,
    pub parallel_runs: usize,
    pub generations: usize,
    pub operators: OperatorSet,
    /// An island stops early once its best error is at or below this value.
    pub stop_error: Option<f64>,
}

impl Default for EvolutionParams {
    fn default() -> Self {
        EvolutionParams {
            mutation_rate: 79.0,
            crossover_rate: 11.0,
            spawn_rate: 10.0,
            elitism_rate: 10.0,
            tournament_size: 5,
            population_size: 300,
            selection_rate: 20.0,
            parallel_runs: 4,
            generations: 100,
            operators: OperatorSet::default(),
            stop_error: None,
        }
    }
}

impl EvolutionParams {
    pub fn validate(&self) -> Result<(), GpError> {
        let rates = [
            ("mutation", self.mutation_rate),
            ("crossover", self.crossover_rate),
            ("spawn", self.spawn_rate),
            ("elitism", self.elitism_rate),
            ("selection", self.selection_rate),
        ];
        for (name, r) in rates {
            if !(0.0..=100.0).contains(&r) {
                return Err(GpError::InvalidParams(format!("{name} rate {r} outside [0, 100]")));
            }
        }
        let sum = self.mutation_rate + self.crossover_rate + self.spawn_rate;
        if (sum - 100.0).abs() > 1e-9 {
            return Err(GpError::InvalidParams(format!("variation rates sum to {sum}, not 100")));
        }
        if self.elitism_rate + self.selection_rate > 100.0 {
            return Err(GpError::InvalidParams("elitism + selection exceed 100".into()));
        }
        if self.tournament_size == 0 || self.population_size < 2 || self.parallel_runs == 0 {
            return Err(GpError::InvalidParams("tournament, population and runs must be positive".into()));
        }
        Ok(())
    }
}

fn objectives(m: &StackModel) -> (f64, usize) {
    (m.fitness.unwrap_or(1.0), m.complexity())
}

fn dominates(a: (f64, usize), b: (f64, usize)) -> bool {
    a.0 <= b.0 && a.1 <= b.1 && (a.0 < b.0 || a.1 < b.1)
}

/// Indices of the models not dominated under minimize(error, complexity).
pub fn non_dominated(models: &[&StackModel]) -> Vec<usize> {
    let objs: Vec<_> = models.iter().map(|m| objectives(m)).collect();
    (0..objs.len())
        .filter(|&i| !objs.iter().any(|&o| dominates(o, objs[i])))
        .collect()
}

/// Peels successive non-dominated layers until at least `want` indices are
/// collected, then truncates to `want` keeping the lowest-error members of
/// the last layer.
pub fn pareto_layers(models: &[StackModel], want: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..models.len()).collect();
    order.sort_by(|&a, &b| {
        let (fa, ca) = objectives(&models[a]);
        let (fb, cb) = objectives(&models[b]);
        fa.total_cmp(&fb).then(ca.cmp(&cb))
    });
    let mut picked = Vec::with_capacity(want);
    while picked.len() < want && !order.is_empty() {
        // One sweep over (error, complexity)-sorted indices yields a front.
        let mut best: Option<(f64, usize)> = None;
        let mut rest = Vec::with_capacity(order.len());
        for &i in &order {
            let o = objectives(&models[i]);
            let on_front = match best {
                None => true,
                Some(b) => o.1 < b.1 || (o.1 == b.1 && o.0 == b.0),
            };
            if on_front {
                if picked.len() < want {
                    picked.push(i);
                }
                if best.is_none_or(|b| o.1 < b.1) {
                    best = Some(o);
                }
            } else {
                rest.push(i);
            }
        }
        order = rest;
    }
    picked
}

/// Draws `k` models (without replacement when possible) and returns a
/// uniformly chosen member of their non-dominated set.
pub fn tournament_select<'a, R: Rng + ?Sized>(pop: &'a [StackModel], k: usize, rng: &mut R) -> &'a StackModel {
    assert!(!pop.is_empty(), "tournament on empty population");
    let entrants: Vec<usize> = if pop.len() >= k {
        sample(rng, pop.len(), k).into_vec()
    } else {
        (0..k).map(|_| rng.random_range(0..pop.len())).collect()
    };
    let objs: Vec<(f64, usize)> = entrants.iter().map(|&i| objectives(&pop[i])).collect();
    let front: Vec<usize> =
        (0..objs.len()).filter(|&i| !objs.iter().any(|&o| dominates(o, objs[i]))).collect();
    &pop[entrants[*front.choose(rng).expect("front is never empty")]]
}

fn score_all(pop: &mut [StackModel], cols: &Columns, labels: &[f64]) {
    for m in pop.iter_mut().filter(|m| m.fitness.is_none()) {
        m.score_columns(cols, labels);
    }
}

fn best_error(pop: &[StackModel]) -> f64 {
    pop.iter().map(|m| m.fitness.unwrap_or(1.0)).fold(1.0, f64::min)
}

fn count(rate: f64, n: usize) -> usize {
    ((rate / 100.0) * n as f64).round() as usize
}

/// Keeps the first of each structure, keyed by the structural digest.
fn dedup_into(models: Vec<StackModel>, seen: &mut HashSet<u64>, out: &mut Vec<StackModel>) {
    for m in models {
        if seen.insert(m.structure_hash()) {
            out.push(m);
        }
    }
}

fn next_generation<R: Rng + ?Sized>(
    pop: &[StackModel],
    params: &EvolutionParams,
    prims: &Primitives,
    rng: &mut R,
) -> Vec<StackModel> {
    let n = params.population_size;
    let n_elite = count(params.elitism_rate, n);
    let n_sel = count(params.selection_rate, n).min(n - n_elite.min(n));
    let n_var = n.saturating_sub(n_elite + n_sel);
    let k = params.tournament_size;

    let mut candidates: Vec<StackModel> = Vec::with_capacity(n + 1);
    candidates.extend(pareto_layers(pop, n_elite).into_iter().map(|i| pop[i].clone()));
    for _ in 0..n_sel {
        candidates.push(tournament_select(pop, k, rng).clone());
    }
    let mut produced = 0;
    while produced < n_var {
        let r = rng.random_range(0.0..100.0);
        if r < params.mutation_rate {
            candidates.push(mutate(tournament_select(pop, k, rng), prims, rng));
            produced += 1;
        } else if r < params.mutation_rate + params.crossover_rate {
            let a = tournament_select(pop, k, rng);
            let b = tournament_select(pop, k, rng);
            let (c1, c2) = crossover(a, b, prims, rng);
            candidates.push(c1);
            produced += 1;
            if produced < n_var {
                candidates.push(c2);
                produced += 1;
            }
        } else {
            candidates.push(prims.spawn(rng));
            produced += 1;
        }
    }

    let mut seen = HashSet::with_capacity(n * 2);
    let mut next = Vec::with_capacity(n);
    dedup_into(candidates, &mut seen, &mut next);
    let mut attempts = 0;
    while next.len() < n && attempts < 20 * n {
        dedup_into(vec![prims.spawn(rng)], &mut seen, &mut next);
        attempts += 1;
    }
    next
}

fn run_island(
    seeds: Vec<StackModel>,
    cols: &Columns,
    labels: &[f64],
    params: &EvolutionParams,
    prims: &Primitives,
    rng: &mut ChaCha8Rng,
) -> Vec<StackModel> {
    let n = params.population_size;
    let mut seen = HashSet::new();
    let mut pop = Vec::with_capacity(n);
    let seeds = seeds
        .into_iter()
        .filter(|m| prims.is_valid(m))
        .map(|mut m| {
            m.reset_scores();
            m
        })
        .take(n)
        .collect();
    dedup_into(seeds, &mut seen, &mut pop);
    let mut attempts = 0;
    while pop.len() < n && attempts < 20 * n {
        dedup_into(vec![prims.spawn(rng)], &mut seen, &mut pop);
        attempts += 1;
    }
    score_all(&mut pop, cols, labels);
    for _ in 0..params.generations {
        if params.stop_error.is_some_and(|t| best_error(&pop) <= t) {
            break;
        }
        pop = next_generation(&pop, params, prims, rng);
        score_all(&mut pop, cols, labels);
    }
    pop
}

/// Runs `parallel_runs` independent islands seeded from `seeds` (dealt
/// round-robin) and returns the merged, deduplicated, aligned population
/// sorted by (error, complexity).
pub fn evolve<R: Rng + ?Sized>(
    data: &TrainingSet,
    seeds: &[StackModel],
    params: &EvolutionParams,
    rng: &mut R,
) -> Vec<StackModel> {
    let prims = Primitives::new(params.operators.clone(), data.dims());
    let cols = data.columns();
    let labels = data.labels();
    let runs = params.parallel_runs.max(1);
    let mut jobs: Vec<(Vec<StackModel>, ChaCha8Rng)> =
        (0..runs).map(|_| (Vec::new(), ChaCha8Rng::seed_from_u64(rng.random()))).collect();
    for (i, s) in seeds.iter().enumerate() {
        jobs[i % runs].0.push(s.clone());
    }
    let islands: Vec<Vec<StackModel>> = jobs
        .into_par_iter()
        .map(|(seeds, mut island_rng)| run_island(seeds, &cols, labels, params, &prims, &mut island_rng))
        .collect();

    let mut seen = HashSet::new();
    let mut merged = Vec::new();
    for island in islands {
        dedup_into(island, &mut seen, &mut merged);
    }
    for m in &mut merged {
        if m.fitness.is_some_and(|f| f < 1.0) {
            m.align_to(&cols, labels);
        }
    }
    merged.sort_by(|a, b| {
        let (fa, ca) = objectives(a);
        let (fb, cb) = objectives(b);
        fa.partial_cmp(&fb).unwrap_or(Ordering::Equal).then(ca.cmp(&cb))
    });
    merged
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::{Bounds, Operator::*, Terminal::*};

    fn scored(f: f64, ops: usize) -> StackModel {
        let mut m = StackModel::new(vec![Sin; ops], vec![Var(0)]);
        m.fitness = Some(f);
        m
    }

    #[test]
    fn tournament_prefers_dominating_model() {
        let pop = vec![scored(0.1, 4), scored(0.2, 6)];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            assert_eq!(tournament_select(&pop, 2, &mut rng).fitness, Some(0.1));
        }
    }

    #[test]
    fn tournament_is_uniform_over_front() {
        let pop = [scored(0.1, 8), scored(0.2, 2)];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let firsts = (0..2000)
            .filter(|_| {
                let s = sample(&mut rng, 2, 2).into_vec();
                let shuffled = [pop[s[0]].clone(), pop[s[1]].clone()];
                tournament_select(&shuffled, 2, &mut rng).fitness == Some(0.1)
            })
            .count();
        assert!((850..1150).contains(&firsts), "{firsts}");
    }

    #[test]
    fn pareto_layers_matches_brute_force_first_front() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pop: Vec<StackModel> =
            (0..200).map(|_| scored((rng.random_range(0..20) as f64) / 20.0, rng.random_range(0..15))).collect();
        let refs: Vec<&StackModel> = pop.iter().collect();
        let mut brute = non_dominated(&refs);
        brute.sort();
        let mut swept = pareto_layers(&pop, pop.len());
        swept.truncate(brute.len());
        swept.sort();
        assert_eq!(swept, brute);
        let mut all = pareto_layers(&pop, pop.len());
        all.sort();
        assert_eq!(all, (0..pop.len()).collect::<Vec<_>>());
    }

    fn line_data(n: usize) -> TrainingSet {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 * 0.7 - 2.0]).collect();
        let labels = rows.iter().map(|r| r[0]).collect();
        TrainingSet::from_rows(Bounds::uniform(1, -5.0, 5.0).unwrap(), rows, labels).unwrap()
    }

    #[test]
    fn elitism_keeps_planted_solution() {
        let data = line_data(10);
        let exact = StackModel::new(vec![], vec![Var(0)]);
        let params = EvolutionParams { generations: 5, population_size: 40, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = evolve(&data, &[exact], &params, &mut rng);
        assert!(out[0].fitness.unwrap() < 1e-12);
    }

    #[test]
    fn returned_population_has_no_duplicates() {
        let data = line_data(8);
        let params = EvolutionParams { generations: 5, population_size: 60, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let out = evolve(&data, &[], &params, &mut rng);
        let set: HashSet<_> = out.iter().cloned().collect();
        assert_eq!(set.len(), out.len());
        assert!(out.windows(2).all(|w| w[0].fitness <= w[1].fitness));
    }

    #[test]
    fn finds_identity_target() {
        let data = line_data(10);
        let params = EvolutionParams { generations: 100, ..Default::default() };
        let mut solved = 0;
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if evolve(&data, &[], &params, &mut rng)[0].fitness.unwrap() < 1e-9 {
                solved += 1;
            }
        }
        assert!(solved >= 19, "{solved}/20");
    }

    #[test]
    fn params_validation() {
        assert!(EvolutionParams::default().validate().is_ok());
        let bad = EvolutionParams { spawn_rate: 20.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
