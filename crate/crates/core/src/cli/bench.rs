use std::io::Write;
use std::path::PathBuf;

use clap::Args;

use super::{out_dir, usage, write_out, CliError, EvolutionArgs};
use crate::al::AcquisitionStrategy;
use crate::bench::{load_problems, run_campaign, write_campaign, ProblemSpec};

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Problem id: a built-in (vdp1, barmag1) or an id from --problems.
    #[arg(long)]
    pub problem: Vec<String>,
    /// Problem file; without --problem every problem in it is run.
    #[arg(long)]
    pub problems: Option<PathBuf>,
    /// Strategy spec, repeatable or comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub strategy: Vec<String>,
    #[arg(long, default_value_t = 25)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Overrides every problem's point cap.
    #[arg(long)]
    pub max_points: Option<usize>,
    #[command(flatten)]
    pub evolution: EvolutionArgs,
    /// Output directory (falls back to $STACKAL_OUT_DIR, then ./results).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn resolve_problems(args: &BenchArgs) -> Result<Vec<ProblemSpec>, CliError> {
    let pool = match &args.problems {
        Some(path) => load_problems(path).map_err(|e| usage(format!("{}: {e}", path.display())))?,
        None => Vec::new(),
    };
    if args.problem.is_empty() {
        if pool.is_empty() {
            return Err(usage("no problems given; use --problem or --problems"));
        }
        return Ok(pool);
    }
    args.problem
        .iter()
        .map(|id| {
            pool.iter()
                .find(|p| &p.id == id)
                .cloned()
                .or_else(|| ProblemSpec::builtin(id))
                .ok_or_else(|| usage(format!("unknown problem `{id}`")))
        })
        .collect()
}

pub fn run(args: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if args.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let strategies: Vec<AcquisitionStrategy> =
        args.strategy.iter().map(|s| s.parse().map_err(usage)).collect::<Result<_, _>>()?;
    let params = args.evolution.params()?;
    let mut problems = resolve_problems(args)?;
    if let Some(m) = args.max_points {
        if m < 3 {
            return Err(usage("--max-points must be at least 3"));
        }
        problems = problems.into_iter().map(|p| p.with_max_points(m)).collect();
    }
    let dir = out_dir(args.out.clone());

    for problem in &problems {
        let campaign = run_campaign(problem, &strategies, args.trials, &params, args.seed);
        let files = write_campaign(&campaign, &dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
        for r in &campaign.results {
            write_out(
                out,
                format_args!(
                    "{} {} median {} censored {}/{} aborted {}\n",
                    r.problem,
                    r.strategy,
                    r.median,
                    r.censored,
                    r.points_used.len(),
                    r.aborted
                ),
            )?;
        }
        for f in files {
            write_out(out, format_args!("wrote {}\n", f.display()))?;
        }
    }
    Ok(())
}
