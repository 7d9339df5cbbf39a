//! Benchmark problem definitions and the line-oriented problem file format.
//!
//! Each non-blank line not starting with `#` reads
//! `id | expression | [index:]name[=lo..hi], ... | max_points`.
//! Missing ranges default to `1..5`; a missing last field means 1000 points.

use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use super::expr::{parse_expression, Expr, ParseError};
use crate::gp::{Bounds, GpError};

pub const DEFAULT_MAX_POINTS: usize = 1000;
pub const DEFAULT_RANGE: (f64, f64) = (1.0, 5.0);

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("problem `{id}`: {source}")]
    Expression { id: String, source: ParseError },
    #[error("problem `{id}`: {source}")]
    Bounds { id: String, source: GpError },
    #[error("unknown problem `{0}`")]
    Unknown(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemSpec {
    pub id: String,
    pub expression: String,
    pub names: Vec<String>,
    pub bounds: Bounds,
    pub max_points: usize,
    #[serde(skip)]
    oracle: Option<Expr>,
}

impl ProblemSpec {
    pub fn new(
        id: &str,
        expression: &str,
        vars: &[(&str, f64, f64)],
        max_points: usize,
    ) -> Result<Self, ProblemError> {
        let names: Vec<String> = vars.iter().map(|v| v.0.to_string()).collect();
        let bounds = Bounds::new(vars.iter().map(|v| (v.1, v.2)).collect())
            .map_err(|source| ProblemError::Bounds { id: id.into(), source })?;
        ProblemSpec::from_parts(id.into(), expression.into(), names, bounds, max_points)
    }

    fn from_parts(
        id: String,
        expression: String,
        names: Vec<String>,
        bounds: Bounds,
        max_points: usize,
    ) -> Result<Self, ProblemError> {
        let oracle = parse_expression(&expression, &names)
            .map_err(|source| ProblemError::Expression { id: id.clone(), source })?;
        Ok(ProblemSpec { id, expression, names, bounds, max_points, oracle: Some(oracle) })
    }

    pub fn dims(&self) -> usize {
        self.bounds.dims()
    }

    pub fn oracle(&self) -> &Expr {
        self.oracle.as_ref().expect("oracle parsed at construction")
    }

    pub fn label(&self, x: &[f64]) -> f64 {
        self.oracle().eval(x)
    }

    /// The van der Pol oscillator rate `x' = 10 (y - (x^3 - x)/3)`.
    pub fn van_der_pol() -> ProblemSpec {
        ProblemSpec::new("vdp1", "10*(y-(1/3)*(x^3-x))", &[("x", -5.0, 5.0), ("y", -5.0, 5.0)], DEFAULT_MAX_POINTS)
            .expect("built-in problem")
    }

    /// The bar magnet rate `x' = 0.5 sin(x - y) - sin(x)`.
    pub fn bar_magnet() -> ProblemSpec {
        ProblemSpec::new("barmag1", "0.5*sin(x-y)-sin(x)", &[("x", -3.0, 3.0), ("y", -3.0, 3.0)], DEFAULT_MAX_POINTS)
            .expect("built-in problem")
    }

    pub fn builtin(id: &str) -> Option<ProblemSpec> {
        match id {
            "vdp1" => Some(ProblemSpec::van_der_pol()),
            "barmag1" => Some(ProblemSpec::bar_magnet()),
            _ => None,
        }
    }

    pub fn with_max_points(mut self, max_points: usize) -> Self {
        self.max_points = max_points;
        self
    }

    /// One line of the problem file format.
    pub fn to_line(&self) -> String {
        let vars: Vec<String> = self
            .names
            .iter()
            .zip(self.bounds.pairs())
            .enumerate()
            .map(|(i, (n, (lo, hi)))| format!("{i}:{n}={lo:?}..{hi:?}"))
            .collect();
        format!("{} | {} | {} | {}", self.id, self.expression, vars.join(", "), self.max_points)
    }
}

fn parse_var(text: &str, position: usize, line: usize) -> Result<(usize, String, (f64, f64)), ProblemError> {
    let bad = |msg: String| ProblemError::Format { line, msg };
    let (index, rest) = match text.split_once(':') {
        Some((i, r)) => (i.trim().parse::<usize>().map_err(|_| bad(format!("bad index in `{text}`")))?, r),
        None => (position, text),
    };
    let (name, range) = match rest.split_once('=') {
        Some((n, r)) => {
            let (lo, hi) = r.split_once("..").ok_or_else(|| bad(format!("expected lo..hi in `{text}`")))?;
            let lo = lo.trim().parse::<f64>().map_err(|_| bad(format!("bad lower bound in `{text}`")))?;
            let hi = hi.trim().parse::<f64>().map_err(|_| bad(format!("bad upper bound in `{text}`")))?;
            (n.trim(), (lo, hi))
        }
        None => (rest.trim(), DEFAULT_RANGE),
    };
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(bad(format!("bad variable name in `{text}`")));
    }
    Ok((index, name.to_string(), range))
}

/// Parses problem-file text.
pub fn parse_problems(text: &str) -> Result<Vec<ProblemSpec>, ProblemError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('|').map(str::trim).collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(ProblemError::Format { line, msg: "expected `id | expression | variables | max_points`".into() });
        }
        let id = fields[0].to_string();
        if id.is_empty() {
            return Err(ProblemError::Format { line, msg: "empty id".into() });
        }
        let mut vars: Vec<(usize, String, (f64, f64))> = fields[2]
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .enumerate()
            .map(|(i, v)| parse_var(v, i, line))
            .collect::<Result<_, _>>()?;
        vars.sort_by_key(|v| v.0);
        if vars.is_empty() || vars.iter().enumerate().any(|(i, v)| v.0 != i) {
            return Err(ProblemError::Format { line, msg: "variable indices must be 0..D without gaps".into() });
        }
        let max_points = match fields.get(3).filter(|s| !s.is_empty()) {
            Some(s) => s
                .parse::<usize>()
                .ok()
                .filter(|&m| m >= 3)
                .ok_or_else(|| ProblemError::Format { line, msg: format!("bad max_points `{s}`") })?,
            None => DEFAULT_MAX_POINTS,
        };
        let names = vars.iter().map(|v| v.1.clone()).collect();
        let bounds = Bounds::new(vars.iter().map(|v| v.2).collect())
            .map_err(|source| ProblemError::Bounds { id: id.clone(), source })?;
        out.push(ProblemSpec::from_parts(id, fields[1].to_string(), names, bounds, max_points)?);
    }
    Ok(out)
}

pub fn load_problems(path: &Path) -> Result<Vec<ProblemSpec>, ProblemError> {
    parse_problems(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_evaluate() {
        assert_eq!(ProblemSpec::van_der_pol().label(&[0.0, 1.0]), 10.0);
        assert_eq!(ProblemSpec::bar_magnet().label(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn file_format_round_trips() {
        let text = "# comment\n\nprod | x1*x2 | 0:x1=1..5, 1:x2=0.5..2 | 40\nlaw | a/b | a, b\n";
        let ps = parse_problems(text).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps[0].max_points, 40);
        assert_eq!(ps[0].bounds.pairs(), &[(1.0, 5.0), (0.5, 2.0)]);
        assert_eq!(ps[1].bounds.pairs(), &[DEFAULT_RANGE, DEFAULT_RANGE]);
        assert_eq!(ps[1].max_points, DEFAULT_MAX_POINTS);
        let again = parse_problems(&ps.iter().map(ProblemSpec::to_line).collect::<Vec<_>>().join("\n")).unwrap();
        assert_eq!(again, ps);
        assert_eq!(again[0].label(&[2.0, 3.0]), 6.0);
    }

    #[test]
    fn malformed_lines_are_rejected() {
        assert!(parse_problems("p | x*q | x | 10").is_err());
        assert!(parse_problems("p | x | x=3..1 | 10").is_err());
        assert!(parse_problems("p | x").is_err());
        assert!(parse_problems("p | x | 1:x | 10").is_err());
        assert!(parse_problems("p | x | x | 2").is_err());
    }
}
