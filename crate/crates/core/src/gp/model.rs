//! Two-stack model representation and its evaluation semantics.
//!
//! A model holds an operator stack and a data stack of terminals, both with
//! index 0 as the top. Operators run from the top down. Each non-shift
//! operator takes its `arity` arguments from the evaluation stack first
//! (deepest of the taken items first, so `a - b` when `a` sits below `b`) and
//! then from the front of the remaining data stack, and pushes its result.
//! `Shift` moves the next terminal onto the evaluation stack. The model output
//! is the top of the evaluation stack after the last operator, or the first
//! terminal when the operator stack is empty.

use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use super::data::{Columns, TrainingSet};
use super::operator::Operator;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Terminal {
    Var(usize),
    Const(f64),
}

impl Terminal {
    #[inline]
    pub fn value(self, row: &[f64]) -> f64 {
        match self {
            Terminal::Var(i) => row[i],
            Terminal::Const(c) => c,
        }
    }

    pub fn is_var(self) -> bool {
        matches!(self, Terminal::Var(_))
    }

    fn key(self) -> (u8, u64) {
        match self {
            Terminal::Var(i) => (0, i as u64),
            // -0.0 and 0.0 compare equal, so they must share a key.
            Terminal::Const(c) => (1, if c == 0.0 { 0 } else { c.to_bits() }),
        }
    }
}

/// Per-operator bookkeeping from a symbolic replay of a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay {
    /// Data-stack index each operator starts drawing from.
    pub starts: Vec<usize>,
    /// Number of terminals each operator draws from the data stack.
    pub draws: Vec<usize>,
    /// Total terminals the operator stack consumes.
    pub demand: usize,
}

impl Replay {
    pub fn of(ops: &[Operator]) -> Replay {
        let mut starts = Vec::with_capacity(ops.len());
        let mut draws = Vec::with_capacity(ops.len());
        let mut depth = 0usize;
        let mut cursor = 0usize;
        for &op in ops {
            starts.push(cursor);
            let take = if op.is_shift() {
                depth += 1;
                1
            } else {
                let from_stack = depth.min(op.arity());
                depth = depth - from_stack + 1;
                op.arity() - from_stack
            };
            draws.push(take);
            cursor += take;
        }
        // An empty operator stack still needs one terminal to return.
        let demand = if ops.is_empty() { 1 } else { cursor };
        Replay { starts, draws, demand }
    }
}

/// A candidate equation plus its cached scores.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StackModel {
    pub ops: Vec<Operator>,
    pub data: Vec<Terminal>,
    /// `1 - R^2` on the data last scored against.
    pub fitness: Option<f64>,
    /// Linear-scaling coefficients `(a0, a1)`; predictions are `a1 * y + a0`.
    pub align: Option<(f64, f64)>,
}

impl PartialEq for StackModel {
    fn eq(&self, other: &Self) -> bool {
        self.ops == other.ops
            && self.data.len() == other.data.len()
            && self.data.iter().zip(&other.data).all(|(a, b)| a.key() == b.key())
    }
}

impl Eq for StackModel {}

impl Hash for StackModel {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ops.hash(state);
        for t in &self.data {
            t.key().hash(state);
        }
    }
}

enum Val<'a> {
    Owned(Vec<f64>),
    Col(&'a [f64]),
    Const(f64),
}

impl<'a> Val<'a> {
    fn terminal(t: Terminal, cols: &'a Columns) -> Val<'a> {
        match t {
            Terminal::Var(i) => Val::Col(cols.column(i)),
            Terminal::Const(c) => Val::Const(c),
        }
    }

    fn into_vec(self, n: usize) -> Vec<f64> {
        match self {
            Val::Owned(v) => v,
            Val::Col(c) => c.to_vec(),
            Val::Const(c) => vec![c; n],
        }
    }
}

fn unary_val(op: Operator, a: Val<'_>) -> Val<'_> {
    match a {
        Val::Const(c) => Val::Const(op.apply_unary(c)),
        Val::Col(x) => Val::Owned(x.iter().map(|&v| op.apply_unary(v)).collect()),
        Val::Owned(mut x) => {
            x.iter_mut().for_each(|v| *v = op.apply_unary(*v));
            Val::Owned(x)
        }
    }
}

fn binary_val<'a>(op: Operator, a: Val<'a>, b: Val<'a>) -> Val<'a> {
    let f = |x: f64, y: f64| op.apply_binary(x, y);
    match (a, b) {
        (Val::Const(x), Val::Const(y)) => Val::Const(f(x, y)),
        (Val::Owned(mut x), Val::Owned(y)) => {
            x.iter_mut().zip(&y).for_each(|(p, &q)| *p = f(*p, q));
            Val::Owned(x)
        }
        (Val::Owned(mut x), Val::Col(y)) => {
            x.iter_mut().zip(y).for_each(|(p, &q)| *p = f(*p, q));
            Val::Owned(x)
        }
        (Val::Owned(mut x), Val::Const(c)) => {
            x.iter_mut().for_each(|p| *p = f(*p, c));
            Val::Owned(x)
        }
        (Val::Col(x), Val::Owned(mut y)) => {
            y.iter_mut().zip(x).for_each(|(q, &p)| *q = f(p, *q));
            Val::Owned(y)
        }
        (Val::Const(c), Val::Owned(mut y)) => {
            y.iter_mut().for_each(|q| *q = f(c, *q));
            Val::Owned(y)
        }
        (Val::Col(x), Val::Col(y)) => Val::Owned(x.iter().zip(y).map(|(&p, &q)| f(p, q)).collect()),
        (Val::Col(x), Val::Const(c)) => Val::Owned(x.iter().map(|&p| f(p, c)).collect()),
        (Val::Const(c), Val::Col(y)) => Val::Owned(y.iter().map(|&q| f(c, q)).collect()),
    }
}

impl StackModel {
    pub fn new(ops: Vec<Operator>, data: Vec<Terminal>) -> Self {
        StackModel { ops, data, fitness: None, align: None }
    }

    /// Combined stack lengths, the parsimony objective.
    pub fn complexity(&self) -> usize {
        self.ops.len() + self.data.len()
    }

    pub fn replay(&self) -> Replay {
        Replay::of(&self.ops)
    }

    /// True when execution cannot underflow.
    pub fn is_feasible(&self) -> bool {
        self.replay().demand <= self.data.len()
    }

    /// Forgets cached scores (after structural edits or a data change).
    pub fn reset_scores(&mut self) {
        self.fitness = None;
        self.align = None;
    }

    /// 64-bit digest of the structure; equal models share a digest.
    pub fn structure_hash(&self) -> u64 {
        const K: u64 = 0x517c_c1b7_2722_0a95;
        let mix = |h: u64, v: u64| (h.rotate_left(5) ^ v).wrapping_mul(K);
        let mut h = mix(0, self.ops.len() as u64);
        for &op in &self.ops {
            h = mix(h, op as u64);
        }
        for t in &self.data {
            let (tag, bits) = t.key();
            h = mix(mix(h, tag as u64 + 1), bits);
        }
        h
    }

    /// Evaluates the raw (unaligned) model at one input row. Returns NaN if
    /// the model would underflow.
    pub fn evaluate(&self, row: &[f64]) -> f64 {
        if self.ops.is_empty() {
            return self.data.first().map_or(f64::NAN, |t| t.value(row));
        }
        let mut stack: Vec<f64> = Vec::with_capacity(4);
        let mut cursor = 0usize;
        let mut args = [0.0f64; 2];
        for &op in &self.ops {
            if op.is_shift() {
                let Some(t) = self.data.get(cursor) else { return f64::NAN };
                stack.push(t.value(row));
                cursor += 1;
                continue;
            }
            let arity = op.arity();
            let from_stack = stack.len().min(arity);
            let base = stack.len() - from_stack;
            args[..from_stack].copy_from_slice(&stack[base..]);
            stack.truncate(base);
            for slot in args.iter_mut().take(arity).skip(from_stack) {
                let Some(t) = self.data.get(cursor) else { return f64::NAN };
                *slot = t.value(row);
                cursor += 1;
            }
            stack.push(op.apply(&args[..arity]));
        }
        stack.last().copied().unwrap_or(f64::NAN)
    }

    /// Evaluates the raw model on every row of `cols`.
    pub fn evaluate_columns(&self, cols: &Columns) -> Vec<f64> {
        let n = cols.len();
        if self.ops.is_empty() {
            return match self.data.first() {
                Some(&t) => Val::terminal(t, cols).into_vec(n),
                None => vec![f64::NAN; n],
            };
        }
        let mut stack: Vec<Val<'_>> = Vec::with_capacity(4);
        let mut cursor = 0usize;
        for &op in &self.ops {
            if op.is_shift() {
                let Some(&t) = self.data.get(cursor) else { return vec![f64::NAN; n] };
                stack.push(Val::terminal(t, cols));
                cursor += 1;
                continue;
            }
            let mut next_terminal = || {
                let t = self.data.get(cursor).copied();
                cursor += 1;
                t.map(|t| Val::terminal(t, cols))
            };
            let out = if op.arity() == 1 {
                let a = match stack.pop() {
                    Some(v) => v,
                    None => match next_terminal() {
                        Some(v) => v,
                        None => return vec![f64::NAN; n],
                    },
                };
                unary_val(op, a)
            } else {
                let (a, b) = match stack.len() {
                    0 => match (next_terminal(), next_terminal()) {
                        (Some(a), Some(b)) => (a, b),
                        _ => return vec![f64::NAN; n],
                    },
                    1 => {
                        let a = stack.pop().expect("len checked");
                        match next_terminal() {
                            Some(b) => (a, b),
                            None => return vec![f64::NAN; n],
                        }
                    }
                    _ => {
                        let b = stack.pop().expect("len checked");
                        let a = stack.pop().expect("len checked");
                        (a, b)
                    }
                };
                binary_val(op, a, b)
            };
            stack.push(out);
        }
        stack.pop().map_or_else(|| vec![f64::NAN; n], |v| v.into_vec(n))
    }

    /// Applies the stored alignment (identity when unaligned).
    #[inline]
    pub fn scale(&self, raw: f64) -> f64 {
        match self.align {
            Some((a0, a1)) => a1 * raw + a0,
            None => raw,
        }
    }

    /// Aligned prediction at one row.
    pub fn predict(&self, row: &[f64]) -> f64 {
        self.scale(self.evaluate(row))
    }

    /// Aligned predictions for every row of `cols`.
    pub fn predict_columns(&self, cols: &Columns) -> Vec<f64> {
        let mut out = self.evaluate_columns(cols);
        if let Some((a0, a1)) = self.align {
            out.iter_mut().for_each(|v| *v = a1 * *v + a0);
        }
        out
    }

    /// Scores the model on `data` as `1 - R^2` and caches the result.
    pub fn score(&mut self, data: &TrainingSet) -> f64 {
        let cols = data.columns();
        self.score_columns(&cols, data.labels())
    }

    pub fn score_columns(&mut self, cols: &Columns, labels: &[f64]) -> f64 {
        let f = correlation_error(&self.evaluate_columns(cols), labels);
        self.fitness = Some(f);
        f
    }

    /// Fits and stores least-squares coefficients mapping raw output onto
    /// `labels`. Returns `None` (and leaves the model unaligned) when the
    /// raw output is degenerate.
    pub fn align_to(&mut self, cols: &Columns, labels: &[f64]) -> Option<(f64, f64)> {
        let raw = self.evaluate_columns(cols);
        self.align = least_squares_line(&raw, labels);
        self.align
    }

    /// Infix rendering using the given variable names (or `x0, x1, …`).
    pub fn expression(&self, names: Option<&[String]>) -> String {
        let name = |i: usize| match names.and_then(|n| n.get(i)) {
            Some(s) => s.clone(),
            None => format!("x{i}"),
        };
        let term = |t: &Terminal| match *t {
            Terminal::Var(i) => name(i),
            Terminal::Const(c) => {
                if c < 0.0 {
                    format!("({c})")
                } else {
                    format!("{c}")
                }
            }
        };
        let body = if self.ops.is_empty() {
            self.data.first().map_or_else(|| "?".to_string(), term)
        } else {
            let mut stack: Vec<String> = Vec::new();
            let mut cursor = 0usize;
            let next = |cursor: &mut usize| {
                let s = self.data.get(*cursor).map_or_else(|| "?".to_string(), term);
                *cursor += 1;
                s
            };
            for &op in &self.ops {
                if op.is_shift() {
                    stack.push(next(&mut cursor));
                    continue;
                }
                let from_stack = stack.len().min(op.arity());
                let mut args: Vec<String> = stack.split_off(stack.len() - from_stack);
                while args.len() < op.arity() {
                    args.push(next(&mut cursor));
                }
                stack.push(if op.arity() == 1 {
                    format!("{}({})", op.symbol(), args[0])
                } else {
                    format!("({} {} {})", args[0], op.symbol(), args[1])
                });
            }
            stack.pop().unwrap_or_else(|| "?".to_string())
        };
        match self.align {
            Some((a0, a1)) => format!("{a1} * {body} + {a0}"),
            None => body,
        }
    }
}

impl fmt::Display for StackModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.expression(None))
    }
}

/// `1 - R^2` between predictions and labels; 1.0 for any non-finite
/// prediction or zero variance on either side.
pub fn correlation_error(pred: &[f64], labels: &[f64]) -> f64 {
    let n = pred.len();
    if n < 2 || n != labels.len() || pred.iter().any(|v| !v.is_finite()) {
        return 1.0;
    }
    let nf = n as f64;
    let mp = pred.iter().sum::<f64>() / nf;
    let ml = labels.iter().sum::<f64>() / nf;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&p, &l) in pred.iter().zip(labels) {
        let dp = p - mp;
        let dl = l - ml;
        sxy += dp * dl;
        sxx += dp * dp;
        syy += dl * dl;
    }
    if !(sxx > 0.0 && syy > 0.0) || !(sxx.is_finite() && sxy.is_finite() && syy.is_finite()) {
        return 1.0;
    }
    let r2 = (sxy * sxy) / (sxx * syy);
    if !r2.is_finite() {
        return 1.0;
    }
    (1.0 - r2).clamp(0.0, 1.0)
}

/// Ordinary least-squares `(a0, a1)` for `labels ≈ a1 * raw + a0`.
pub fn least_squares_line(raw: &[f64], labels: &[f64]) -> Option<(f64, f64)> {
    let n = raw.len();
    if n == 0 || n != labels.len() || raw.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let nf = n as f64;
    let mx = raw.iter().sum::<f64>() / nf;
    let my = labels.iter().sum::<f64>() / nf;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (&x, &y) in raw.iter().zip(labels) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx.is_nan() || sxx <= 0.0 || !sxx.is_finite() {
        return None;
    }
    let a1 = sxy / sxx;
    let a0 = my - a1 * mx;
    (a0.is_finite() && a1.is_finite()).then_some((a0, a1))
}
