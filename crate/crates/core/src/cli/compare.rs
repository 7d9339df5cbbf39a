use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Args;

use super::{runtime, usage, write_out, CliError};
use crate::bench::{mann_whitney, median, read_trials_csv, TrialRecord};

pub const SIGNIFICANCE: f64 = 0.05;

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Trial CSV of the first strategy.
    pub a: PathBuf,
    /// Trial CSV of the second strategy.
    pub b: PathBuf,
}

fn load(path: &Path) -> Result<(String, String, Vec<f64>), CliError> {
    let records: Vec<TrialRecord> = read_trials_csv(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let first = records.first().ok_or_else(|| usage(format!("{}: no trials", path.display())))?;
    if records.iter().any(|r| r.problem != first.problem) {
        return Err(usage(format!("{}: mixes several problems", path.display())));
    }
    let points = records.iter().map(|r| r.points_used as f64).collect();
    Ok((first.problem.clone(), first.strategy.clone(), points))
}

pub fn run(args: &CompareArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (pa, sa, a) = load(&args.a)?;
    let (pb, sb, b) = load(&args.b)?;
    if pa != pb {
        return Err(usage(format!("problems differ: `{pa}` vs `{pb}`")));
    }
    let mw = mann_whitney(&a, &b).map_err(runtime)?;
    let verdict = if mw.p < SIGNIFICANCE { "SIGNIFICANT" } else { "NOT significant" };
    let med = |v: &[f64]| median(v).unwrap_or(f64::NAN);
    write_out(out, format_args!("problem {pa}\n"))?;
    write_out(out, format_args!("a {sa} n {} median {}\n", a.len(), med(&a)))?;
    write_out(out, format_args!("b {sb} n {} median {}\n", b.len(), med(&b)))?;
    write_out(out, format_args!("U {} p {:.6} {verdict} at {SIGNIFICANCE}\n", mw.u, mw.p))
}
