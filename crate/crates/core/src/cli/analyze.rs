use std::io::Write;

use clap::Args;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{parse_bounds, usage, write_out, CliError};
use crate::acquisition::{metric_comparison, DiversityMetric, MetricRow};
use crate::al::{sample_uniform, AcquisitionStrategy};
use crate::bench::{pearson_r2, spearman_rho, DEFAULT_RANGE};
use crate::gp::TrainingSet;

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub dims: Option<usize>,
    #[arg(long)]
    pub bounds: Option<String>,
    /// Diversity metric that picks each point: mindist, meandist or jointcorr.
    #[arg(long, default_value = "mindist")]
    pub selector: String,
    /// Random starting points.
    #[arg(long, default_value_t = 3)]
    pub initial: usize,
    #[arg(long, default_value_t = 100)]
    pub iterations: usize,
    /// Uniform candidates per step (box corners are always added).
    #[arg(long, default_value_t = 1000)]
    pub cloud: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn selector(name: &str) -> Result<DiversityMetric, CliError> {
    match format!("diversity:{name}").parse::<AcquisitionStrategy>() {
        Ok(AcquisitionStrategy::Diversity { metric, .. }) => Ok(metric),
        _ => Err(usage(format!("unknown selector `{name}`; use mindist, meandist or jointcorr"))),
    }
}

fn correlate(out: &mut dyn Write, name: &str, x: &[f64], y: &[f64]) -> Result<(), CliError> {
    let r2 = pearson_r2(x, y).map_or_else(|e| e.to_string(), |v| format!("{v:.4}"));
    let rho = spearman_rho(x, y).map_or_else(|e| e.to_string(), |v| format!("{v:.4}"));
    write_out(out, format_args!("# {name}: pearson_r2 {r2} spearman_rho {rho}\n"))
}

/// Prints one CSV row per chosen point, then correlations between the
/// metric columns.
pub fn run(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let metric = selector(&args.selector)?;
    let bounds = parse_bounds(args.bounds.as_deref(), args.dims, DEFAULT_RANGE)?;
    if args.initial == 0 {
        return Err(usage("--initial must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let rows: Vec<Vec<f64>> = (0..args.initial).map(|_| sample_uniform(&bounds, &mut rng)).collect();
    let labels = vec![0.0; rows.len()];
    let data = TrainingSet::from_rows(bounds, rows, labels).map_err(usage)?;
    let table: Vec<MetricRow> = metric_comparison(&data, metric, args.iterations, args.cloud, &mut rng).map_err(usage)?;

    write_out(out, format_args!("iteration,min_dist,mean_dist,joint_corr\n"))?;
    for r in &table {
        write_out(out, format_args!("{},{:?},{:?},{:?}\n", r.iteration, r.min_dist, r.mean_dist, r.joint_corr))?;
    }
    let col = |f: fn(&MetricRow) -> f64| table.iter().map(f).collect::<Vec<f64>>();
    let (min, mean, joint) = (col(|r| r.min_dist), col(|r| r.mean_dist), col(|r| r.joint_corr));
    correlate(out, "min_dist~mean_dist", &min, &mean)?;
    if data.dims() >= 3 {
        correlate(out, "min_dist~joint_corr", &min, &joint)?;
        correlate(out, "mean_dist~joint_corr", &mean, &joint)?;
    }
    Ok(())
}
