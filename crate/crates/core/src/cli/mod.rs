//! Command-line front end. [`run`] is the whole program minus process
//! setup, so tests can drive it with in-memory streams.

mod analyze;
mod bench;
mod compare;
mod session;

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::gp::{Bounds, EvolutionParams, OperatorSet};

pub use session::Session;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Default output directory for campaign artifacts.
pub const OUT_DIR_ENV: &str = "STACKAL_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unreadable or malformed inputs.
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_FAILURE,
        }
    }
}

pub(crate) fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

pub(crate) fn runtime<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "stackal", version, about = "Symbolic regression with active data acquisition")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run seeded trials of one or more strategies and write CSV/JSONL results.
    Bench(bench::BenchArgs),
    /// Compare two trial CSVs with a Mann-Whitney test.
    Compare(compare::CompareArgs),
    /// Step a persisted labeling session: print the next point or record a label.
    Suggest(session::SuggestArgs),
    /// Run a labeling session over stdin/stdout.
    Interactive(session::InteractiveArgs),
    /// Compare diversity metrics on greedily chosen points.
    Analyze(analyze::AnalyzeArgs),
}

/// Evolution settings that can be overridden from the command line.
#[derive(Debug, Clone, Args)]
pub struct EvolutionArgs {
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub population: Option<usize>,
    /// Independent populations evolved per search.
    #[arg(long)]
    pub islands: Option<usize>,
    #[arg(long)]
    pub tournament: Option<usize>,
    /// Comma list such as `+,-,*,/,sin,shift*4`.
    #[arg(long)]
    pub operators: Option<String>,
}

impl EvolutionArgs {
    pub fn params(&self) -> Result<EvolutionParams, CliError> {
        let mut p = EvolutionParams::default();
        if let Some(g) = self.generations {
            p.generations = g;
        }
        if let Some(n) = self.population {
            p.population_size = n;
        }
        if let Some(n) = self.islands {
            p.parallel_runs = n;
        }
        if let Some(k) = self.tournament {
            p.tournament_size = k;
        }
        if let Some(ops) = &self.operators {
            p.operators = OperatorSet::parse(ops).map_err(usage)?;
        }
        p.validate().map_err(usage)?;
        Ok(p)
    }
}

/// Parses `lo..hi,lo..hi,...`. With `dims` given and no text, every
/// dimension gets `default`.
pub fn parse_bounds(text: Option<&str>, dims: Option<usize>, default: (f64, f64)) -> Result<Bounds, CliError> {
    let pairs: Vec<(f64, f64)> = match text {
        Some(t) => t
            .split(',')
            .map(|r| {
                let (lo, hi) = r.split_once("..").ok_or_else(|| usage(format!("expected lo..hi, got `{r}`")))?;
                let lo = lo.trim().parse::<f64>().map_err(|_| usage(format!("bad bound in `{r}`")))?;
                let hi = hi.trim().parse::<f64>().map_err(|_| usage(format!("bad bound in `{r}`")))?;
                Ok((lo, hi))
            })
            .collect::<Result<_, CliError>>()?,
        None => match dims {
            Some(d) => vec![default; d],
            None => return Err(usage("either --dims or --bounds is required")),
        },
    };
    if let Some(d) = dims {
        if d != pairs.len() {
            return Err(usage(format!("--dims {d} but {} bound pairs given", pairs.len())));
        }
    }
    Bounds::new(pairs).map_err(usage)
}

pub(crate) fn write_out(out: &mut dyn Write, text: std::fmt::Arguments<'_>) -> Result<(), CliError> {
    out.write_fmt(text).map_err(runtime)
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code; diagnostics go to `err`.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Bench(a) => bench::run(&a, out),
        Command::Compare(a) => compare::run(&a, out),
        Command::Suggest(a) => session::suggest(&a, out),
        Command::Interactive(a) => session::interactive(&a, input, out),
        Command::Analyze(a) => analyze::run(&a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub(crate) fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("results"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_parse_and_check_dims() {
        let b = parse_bounds(Some("0..6, -1.5..2"), Some(2), (1.0, 5.0)).unwrap();
        assert_eq!(b.pairs(), &[(0.0, 6.0), (-1.5, 2.0)]);
        assert_eq!(parse_bounds(None, Some(3), (1.0, 5.0)).unwrap().dims(), 3);
        assert!(parse_bounds(Some("0..6"), Some(2), (1.0, 5.0)).is_err());
        assert!(parse_bounds(Some("6..0"), None, (1.0, 5.0)).is_err());
        assert!(parse_bounds(Some("0-6"), None, (1.0, 5.0)).is_err());
        assert!(parse_bounds(None, None, (1.0, 5.0)).is_err());
    }

    #[test]
    fn evolution_overrides_apply() {
        let a = EvolutionArgs {
            generations: Some(7),
            population: Some(40),
            islands: Some(1),
            tournament: None,
            operators: Some("+,*,shift".into()),
        };
        let p = a.params().unwrap();
        assert_eq!((p.generations, p.population_size, p.parallel_runs), (7, 40, 1));
        let bad = EvolutionArgs { operators: Some("tanh".into()), ..a };
        assert!(matches!(bad.params(), Err(CliError::Usage(_))));
    }
}
