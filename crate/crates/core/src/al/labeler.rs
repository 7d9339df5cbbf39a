use std::io::{BufRead, Write};

use super::AlError;
use crate::bench::ProblemSpec;

/// Source of labels for queried points.
pub trait Labeler {
    fn label(&mut self, index: usize, point: &[f64]) -> Result<f64, AlError>;
}

/// Labels points by evaluating a problem's formula.
pub struct OracleLabeler<'a> {
    pub problem: &'a ProblemSpec,
}

impl Labeler for OracleLabeler<'_> {
    fn label(&mut self, _index: usize, point: &[f64]) -> Result<f64, AlError> {
        Ok(self.problem.label(point))
    }
}

impl<F: FnMut(&[f64]) -> f64> Labeler for F {
    fn label(&mut self, _index: usize, point: &[f64]) -> Result<f64, AlError> {
        Ok(self(point))
    }
}

/// Line protocol: writes `QUERY <idx> <x1> ... <xD>` and reads
/// `LABEL <idx> <value>`; `ABORT` ends the trial.
pub struct InteractiveLabeler<R, W> {
    input: R,
    output: W,
}

impl<R: BufRead, W: Write> InteractiveLabeler<R, W> {
    pub fn new(input: R, output: W) -> Self {
        InteractiveLabeler { input, output }
    }
}

pub fn format_query(index: usize, point: &[f64]) -> String {
    let coords: Vec<String> = point.iter().map(|x| format!("{x:?}")).collect();
    format!("QUERY {index} {}", coords.join(" "))
}

impl<R: BufRead, W: Write> Labeler for InteractiveLabeler<R, W> {
    fn label(&mut self, index: usize, point: &[f64]) -> Result<f64, AlError> {
        writeln!(self.output, "{}", format_query(index, point)).map_err(|e| AlError::Io(e.to_string()))?;
        self.output.flush().map_err(|e| AlError::Io(e.to_string()))?;
        loop {
            let mut line = String::new();
            let n = self.input.read_line(&mut line).map_err(|e| AlError::Io(e.to_string()))?;
            if n == 0 {
                return Err(AlError::Aborted);
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens.as_slice() {
                [] => continue,
                ["ABORT"] => return Err(AlError::Aborted),
                ["LABEL", i, v] => {
                    let i: usize = i.parse().map_err(|_| AlError::Protocol(line.trim().to_string()))?;
                    let v: f64 = v.parse().map_err(|_| AlError::Protocol(line.trim().to_string()))?;
                    if i != index {
                        return Err(AlError::Protocol(format!("expected label for {index}, got {i}")));
                    }
                    if !v.is_finite() {
                        return Err(AlError::Protocol(format!("label {v} is not finite")));
                    }
                    return Ok(v);
                }
                _ => return Err(AlError::Protocol(line.trim().to_string())),
            }
        }
    }
}
