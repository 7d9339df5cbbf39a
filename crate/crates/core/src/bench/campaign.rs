//! Seeded multi-trial runs of the active-learning loop.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use log::warn;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::problem::ProblemSpec;
use super::stats::{mann_whitney, median};
use crate::al::{run_al, AcquisitionStrategy, OracleLabeler, TrialResult};
use crate::gp::EvolutionParams;

/// Seed for trial `trial`, shared by every strategy so trials are paired.
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    // splitmix64 finalizer over the combined input.
    let mut z = master ^ (trial as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub problem: String,
    pub strategy: String,
    pub trial: usize,
    pub seed: u64,
    pub points_used: usize,
    pub solved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignResult {
    pub problem: String,
    pub strategy: String,
    pub points_used: Vec<usize>,
    /// Unsolved trials count at the point cap.
    pub median: f64,
    pub censored: usize,
    pub aborted: usize,
}

impl CampaignResult {
    pub fn from_records(problem: &str, strategy: &str, records: &[TrialRecord], aborted: usize) -> Self {
        let points_used: Vec<usize> = records.iter().map(|r| r.points_used).collect();
        let as_f64: Vec<f64> = points_used.iter().map(|&p| p as f64).collect();
        CampaignResult {
            problem: problem.to_string(),
            strategy: strategy.to_string(),
            median: median(&as_f64).unwrap_or(f64::NAN),
            censored: records.iter().filter(|r| !r.solved).count(),
            aborted,
            points_used,
        }
    }

    pub fn samples(&self) -> Vec<f64> {
        self.points_used.iter().map(|&p| p as f64).collect()
    }
}

pub struct Campaign {
    pub problem: ProblemSpec,
    pub strategies: Vec<AcquisitionStrategy>,
    pub records: Vec<TrialRecord>,
    pub results: Vec<CampaignResult>,
    pub trials: Vec<(TrialRecord, TrialResult)>,
}

pub fn run_trial(
    problem: &ProblemSpec,
    strategy: &AcquisitionStrategy,
    params: &EvolutionParams,
    seed: u64,
) -> TrialResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut oracle = OracleLabeler { problem };
    run_al(problem, strategy, params, &mut oracle, &mut rng)
}

/// Runs `trials` seeded trials of every strategy. Trials run in parallel;
/// results are ordered by strategy, then trial index.
pub fn run_campaign(
    problem: &ProblemSpec,
    strategies: &[AcquisitionStrategy],
    trials: usize,
    params: &EvolutionParams,
    master_seed: u64,
) -> Campaign {
    let jobs: Vec<(usize, usize)> = (0..strategies.len()).flat_map(|s| (0..trials).map(move |t| (s, t))).collect();
    let outcomes: Vec<(TrialRecord, TrialResult)> = jobs
        .par_iter()
        .map(|&(s, t)| {
            let seed = trial_seed(master_seed, t);
            let result = run_trial(problem, &strategies[s], params, seed);
            let record = TrialRecord {
                problem: problem.id.clone(),
                strategy: strategies[s].to_string(),
                trial: t,
                seed,
                points_used: result.points_used,
                solved: result.solved,
            };
            (record, result)
        })
        .collect();

    let mut records = Vec::new();
    let mut results = Vec::new();
    for strategy in strategies {
        let name = strategy.to_string();
        let mine: Vec<&(TrialRecord, TrialResult)> = outcomes.iter().filter(|(r, _)| r.strategy == name).collect();
        let aborted = mine.iter().filter(|(_, res)| res.aborted).count();
        if aborted > 0 {
            warn!("{}/{}: {aborted} aborted trials excluded", problem.id, name);
        }
        let kept: Vec<TrialRecord> = mine.iter().filter(|(_, res)| !res.aborted).map(|(r, _)| r.clone()).collect();
        results.push(CampaignResult::from_records(&problem.id, &name, &kept, aborted));
        records.extend(kept);
    }
    Campaign { problem: problem.clone(), strategies: strategies.to_vec(), records, results, trials: outcomes }
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    problem: &'a str,
    strategy: &'a str,
    trials: usize,
    median: f64,
    censored: usize,
    aborted: usize,
}

#[derive(Serialize)]
struct PairRow<'a> {
    problem: &'a str,
    strategy_a: &'a str,
    strategy_b: &'a str,
    median_a: f64,
    median_b: f64,
    u: f64,
    p: f64,
}

#[derive(Serialize)]
struct LogLine<'a> {
    problem: &'a str,
    strategy: &'a str,
    trial: usize,
    #[serde(flatten)]
    entry: &'a crate::al::IterationLog,
}

/// Writes per-strategy trial CSVs, a summary CSV with medians, a pairwise
/// CSV with Mann–Whitney results and a JSONL file of iteration logs.
pub fn write_campaign(campaign: &Campaign, out_dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let id = &campaign.problem.id;
    let mut written = Vec::new();
    let to_io = |e: csv::Error| std::io::Error::other(e);

    for strategy in &campaign.strategies {
        let name = strategy.to_string();
        let path = out_dir.join(format!("{id}_{}_trials.csv", strategy.label()));
        let mut w = csv::Writer::from_path(&path).map_err(to_io)?;
        for r in campaign.records.iter().filter(|r| r.strategy == name) {
            w.serialize(r).map_err(to_io)?;
        }
        w.flush()?;
        written.push(path);
    }

    let path = out_dir.join(format!("{id}_summary.csv"));
    let mut w = csv::Writer::from_path(&path).map_err(to_io)?;
    for r in &campaign.results {
        w.serialize(SummaryRow {
            problem: &r.problem,
            strategy: &r.strategy,
            trials: r.points_used.len(),
            median: r.median,
            censored: r.censored,
            aborted: r.aborted,
        })
        .map_err(to_io)?;
    }
    w.flush()?;
    written.push(path);

    let path = out_dir.join(format!("{id}_pairwise.csv"));
    let mut w = csv::Writer::from_path(&path).map_err(to_io)?;
    for (i, a) in campaign.results.iter().enumerate() {
        for b in &campaign.results[i + 1..] {
            if let Ok(mw) = mann_whitney(&a.samples(), &b.samples()) {
                w.serialize(PairRow {
                    problem: &a.problem,
                    strategy_a: &a.strategy,
                    strategy_b: &b.strategy,
                    median_a: a.median,
                    median_b: b.median,
                    u: mw.u,
                    p: mw.p,
                })
                .map_err(to_io)?;
            }
        }
    }
    w.flush()?;
    written.push(path);

    let path = out_dir.join(format!("{id}_iterations.jsonl"));
    let mut w = BufWriter::new(File::create(&path)?);
    for (rec, res) in &campaign.trials {
        for entry in &res.log {
            let line = LogLine { problem: &rec.problem, strategy: &rec.strategy, trial: rec.trial, entry };
            serde_json::to_writer(&mut w, &line)?;
            w.write_all(b"\n")?;
        }
    }
    w.flush()?;
    written.push(path);
    Ok(written)
}

pub fn read_trials_csv(path: &Path) -> Result<Vec<TrialRecord>, csv::Error> {
    csv::Reader::from_path(path)?.deserialize().collect()
}
