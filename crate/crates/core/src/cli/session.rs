use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{parse_bounds, runtime, usage, write_out, CliError, EvolutionArgs};
use crate::al::{format_query, AcquisitionStrategy, AlError, InteractiveLabeler, Labeler, Learner};
use crate::bench::DEFAULT_RANGE;

/// Everything needed to resume labeling in a later process: data, the
/// current population, points awaiting labels and the generator state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Session {
    pub learner: Learner,
    /// Queried points without a label yet, oldest first.
    pub pending: Vec<Vec<f64>>,
    pub rng: ChaCha8Rng,
}

impl Session {
    pub fn new(learner: Learner, seed: u64) -> Self {
        Session { learner, pending: Vec::new(), rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: corrupt session: {e}", path.display())))
    }

    /// Writes through a temporary file so an interrupted save never leaves
    /// a truncated session behind.
    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string(self).map_err(runtime)?;
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        fs::write(&tmp, text).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
        fs::rename(&tmp, path).map_err(|e| runtime(format!("{}: {e}", path.display())))
    }

    /// Index the next labeled point will get.
    pub fn next_index(&self) -> usize {
        self.learner.data.len()
    }

    /// Queues the three starting points.
    pub fn start(&mut self) {
        let pts = self.learner.initial_points(&mut self.rng);
        self.pending.extend(pts);
    }

    /// Records a label for the oldest pending point. Refits once nothing is
    /// pending any more. Returns the labeled index.
    pub fn record(&mut self, label: f64) -> Result<usize, CliError> {
        if self.pending.is_empty() {
            return Err(usage("no pending point to label"));
        }
        if !label.is_finite() {
            return Err(usage(format!("label {label} is not finite")));
        }
        let index = self.next_index();
        let point = self.pending.remove(0);
        self.learner.add(point, label).map_err(usage)?;
        if self.pending.is_empty() {
            self.learner.refit(&[], &mut self.rng);
        }
        Ok(index)
    }

    /// Picks the next point with the session's strategy and queues it.
    pub fn suggest(&mut self) -> Result<Vec<f64>, CliError> {
        if self.learner.data.is_empty() {
            self.start();
            return Ok(self.pending[0].clone());
        }
        let sel = self.learner.select(&mut self.rng).map_err(runtime)?;
        self.pending.push(sel.point.clone());
        Ok(sel.point)
    }

    fn pending_queries(&self) -> Vec<String> {
        let base = self.next_index();
        self.pending.iter().enumerate().map(|(i, p)| format_query(base + i, p)).collect()
    }
}

#[derive(Debug, Clone, Args)]
pub struct SuggestArgs {
    /// Session file (JSON).
    #[arg(long)]
    pub session: PathBuf,
    /// Start a new session, replacing any existing file.
    #[arg(long)]
    pub init: bool,
    #[arg(long)]
    pub dims: Option<usize>,
    /// Sampling box as `lo..hi,lo..hi,...`; defaults to 1..5 per dimension.
    #[arg(long)]
    pub bounds: Option<String>,
    #[arg(long, default_value = "pareto")]
    pub strategy: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Label for the oldest pending point.
    #[arg(long, allow_hyphen_values = true)]
    pub label: Option<f64>,
    #[command(flatten)]
    pub evolution: EvolutionArgs,
}

fn new_learner(
    strategy: &str,
    dims: Option<usize>,
    bounds: Option<&str>,
    evolution: &EvolutionArgs,
) -> Result<Learner, CliError> {
    let strategy: AcquisitionStrategy = strategy.parse().map_err(usage)?;
    let bounds = parse_bounds(bounds, dims, DEFAULT_RANGE)?;
    Ok(Learner::new(strategy, evolution.params()?, bounds))
}

fn print_best(session: &Session, out: &mut dyn Write) -> Result<(), CliError> {
    if let Some(best) = session.learner.best() {
        write_out(out, format_args!("BEST {:e} {}\n", session.learner.best_error(), best.expression(None)))?;
    }
    Ok(())
}

/// `--init` queues and prints the starting points; `--label` records a
/// label; otherwise the pending point (or a freshly suggested one) is printed.
pub fn suggest(args: &SuggestArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut session = if args.init {
        let learner = new_learner(&args.strategy, args.dims, args.bounds.as_deref(), &args.evolution)?;
        let mut s = Session::new(learner, args.seed);
        s.start();
        s
    } else {
        if args.dims.is_some() || args.bounds.is_some() {
            return Err(usage("--dims/--bounds only apply with --init"));
        }
        Session::load(&args.session)?
    };

    match args.label {
        Some(v) if !args.init => {
            let refits = session.pending.len() == 1;
            let index = session.record(v)?;
            write_out(out, format_args!("LABELED {index} {v:?}\n"))?;
            if refits {
                print_best(&session, out)?;
            }
        }
        Some(_) => return Err(usage("--label cannot be combined with --init")),
        None if session.pending.is_empty() => {
            let point = session.suggest()?;
            let index = session.next_index() + session.pending.len() - 1;
            write_out(out, format_args!("{}\n", format_query(index, &point)))?;
        }
        None => {
            for q in session.pending_queries() {
                write_out(out, format_args!("{q}\n"))?;
            }
        }
    }
    session.save(&args.session)
}

#[derive(Debug, Clone, Args)]
pub struct InteractiveArgs {
    #[arg(long)]
    pub dims: Option<usize>,
    #[arg(long)]
    pub bounds: Option<String>,
    #[arg(long, default_value = "pareto")]
    pub strategy: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub max_points: usize,
    /// Stop once the best model's training error (1 - R^2) is at most this.
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[command(flatten)]
    pub evolution: EvolutionArgs,
}

/// Runs the labeling loop over a line protocol: `QUERY i x...` out,
/// `LABEL i v` or `ABORT` in. Ends with `SOLVED`, `BUDGET` or `ABORTED`.
pub fn interactive(args: &InteractiveArgs, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<(), CliError> {
    if args.max_points < 3 {
        return Err(usage("--max-points must be at least 3"));
    }
    let learner = new_learner(&args.strategy, args.dims, args.bounds.as_deref(), &args.evolution)?;
    let mut session = Session::new(learner, args.seed);
    session.start();

    let result = (|| -> Result<(), AlError> {
        loop {
            while !session.pending.is_empty() {
                let index = session.next_index();
                let label = InteractiveLabeler::new(&mut *input, &mut *out).label(index, &session.pending[0])?;
                session.record(label).map_err(|e| AlError::Protocol(e.to_string()))?;
            }
            if session.learner.best_error() <= args.tolerance || session.learner.data.len() >= args.max_points {
                return Ok(());
            }
            session.suggest().map_err(|e| AlError::Protocol(e.to_string()))?;
        }
    })();

    let n = session.learner.data.len();
    match result {
        Ok(()) => {
            let tag = if session.learner.best_error() <= args.tolerance { "SOLVED" } else { "BUDGET" };
            write_out(out, format_args!("{tag} {n}\n"))?;
            print_best(&session, out)
        }
        Err(AlError::Aborted) => {
            write_out(out, format_args!("ABORTED {n}\n"))?;
            print_best(&session, out)
        }
        Err(e) => Err(runtime(e)),
    }
}
