//! Operator registry for stack models.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::GpError;

/// A primitive that can sit on the operator stack.
///
/// Every variant except [`Operator::Shift`] is a pure numeric function of
/// `arity()` reals. `Shift` moves the next terminal from the data stack onto
/// the evaluation stack without computing anything; it is what lets a linear
/// operator stack build sub-expressions that are later combined (for example
/// `sin(x - y) - sin(x)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Operator {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Shift,
}

impl Operator {
    pub const ALL: [Operator; 11] = [
        Operator::Add,
        Operator::Sub,
        Operator::Mul,
        Operator::Div,
        Operator::Pow,
        Operator::Sin,
        Operator::Cos,
        Operator::Exp,
        Operator::Log,
        Operator::Sqrt,
        Operator::Shift,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Operator::Add => "+",
            Operator::Sub => "-",
            Operator::Mul => "*",
            Operator::Div => "/",
            Operator::Pow => "^",
            Operator::Sin => "sin",
            Operator::Cos => "cos",
            Operator::Exp => "exp",
            Operator::Log => "log",
            Operator::Sqrt => "sqrt",
            Operator::Shift => "shift",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Operator::Add | Operator::Sub | Operator::Mul | Operator::Div | Operator::Pow => 2,
            Operator::Sin
            | Operator::Cos
            | Operator::Exp
            | Operator::Log
            | Operator::Sqrt
            | Operator::Shift => 1,
        }
    }

    pub fn is_shift(self) -> bool {
        self == Operator::Shift
    }

    /// Applies the operator to a single argument tuple. Non-finite results
    /// are returned as-is. `Shift` is the identity.
    pub fn apply(self, args: &[f64]) -> f64 {
        match self {
            Operator::Add => args[0] + args[1],
            Operator::Sub => args[0] - args[1],
            Operator::Mul => args[0] * args[1],
            Operator::Div => args[0] / args[1],
            Operator::Pow => args[0].powf(args[1]),
            Operator::Sin => args[0].sin(),
            Operator::Cos => args[0].cos(),
            Operator::Exp => args[0].exp(),
            Operator::Log => args[0].ln(),
            Operator::Sqrt => args[0].sqrt(),
            Operator::Shift => args[0],
        }
    }

    #[inline]
    pub(crate) fn apply_unary(self, a: f64) -> f64 {
        match self {
            Operator::Sin => a.sin(),
            Operator::Cos => a.cos(),
            Operator::Exp => a.exp(),
            Operator::Log => a.ln(),
            Operator::Sqrt => a.sqrt(),
            _ => a,
        }
    }

    #[inline]
    pub(crate) fn apply_binary(self, a: f64, b: f64) -> f64 {
        match self {
            Operator::Add => a + b,
            Operator::Sub => a - b,
            Operator::Mul => a * b,
            Operator::Div => a / b,
            Operator::Pow => a.powf(b),
            _ => f64::NAN,
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Operator {
    type Err = GpError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Operator::ALL
            .iter()
            .copied()
            .find(|op| op.symbol() == s.trim())
            .ok_or_else(|| GpError::UnknownOperator(s.trim().to_string()))
    }
}

/// The operators available to evolution, each with an integer sampling weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSet {
    entries: Vec<(Operator, u32)>,
}

impl Default for OperatorSet {
    fn default() -> Self {
        let mut entries: Vec<(Operator, u32)> = Operator::ALL
            .iter()
            .filter(|op| !op.is_shift())
            .map(|&op| (op, 1))
            .collect();
        entries.push((Operator::Shift, 4));
        OperatorSet { entries }
    }
}

impl OperatorSet {
    /// Builds a set with uniform weights. Duplicates are merged.
    pub fn new(ops: &[Operator]) -> Result<Self, GpError> {
        let mut set = OperatorSet { entries: Vec::new() };
        for &op in ops {
            set.add(op, 1);
        }
        set.validate()?;
        Ok(set)
    }

    /// Parses a comma list such as `+,-,*,sin,shift*4` (`*n` sets the weight).
    pub fn parse(spec: &str) -> Result<Self, GpError> {
        let mut set = OperatorSet { entries: Vec::new() };
        for token in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            // "*" alone is multiplication; a trailing "*<digits>" is a weight.
            let (sym, weight) = match token.rsplit_once('*') {
                Some((s, w)) if !s.is_empty() && !w.is_empty() && w.bytes().all(|b| b.is_ascii_digit()) => {
                    (s, w.parse::<u32>().map_err(|_| GpError::UnknownOperator(token.to_string()))?)
                }
                _ => (token, 1),
            };
            set.add(sym.parse()?, weight);
        }
        set.validate()?;
        Ok(set)
    }

    fn add(&mut self, op: Operator, weight: u32) {
        if let Some(e) = self.entries.iter_mut().find(|e| e.0 == op) {
            e.1 += weight;
        } else {
            self.entries.push((op, weight));
        }
    }

    fn validate(&self) -> Result<(), GpError> {
        if self.entries.iter().all(|e| e.0.is_shift() || e.1 == 0) {
            return Err(GpError::EmptyOperatorSet);
        }
        Ok(())
    }

    pub fn operators(&self) -> impl Iterator<Item = Operator> + '_ {
        self.entries.iter().filter(|e| e.1 > 0).map(|e| e.0)
    }

    pub fn contains(&self, op: Operator) -> bool {
        self.entries.iter().any(|e| e.0 == op && e.1 > 0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Operator {
        let total: u32 = self.entries.iter().map(|e| e.1).sum();
        let mut pick = rng.random_range(0..total);
        for &(op, w) in &self.entries {
            if pick < w {
                return op;
            }
            pick -= w;
        }
        unreachable!("weights sum to total")
    }

    /// Samples among operators satisfying `pred`, uniformly by weight.
    pub fn sample_where<R, F>(&self, rng: &mut R, pred: F) -> Option<Operator>
    where
        R: Rng + ?Sized,
        F: Fn(Operator) -> bool,
    {
        let total: u32 = self.entries.iter().filter(|e| pred(e.0)).map(|e| e.1).sum();
        if total == 0 {
            return None;
        }
        let mut pick = rng.random_range(0..total);
        for &(op, w) in self.entries.iter().filter(|e| pred(e.0)) {
            if pick < w {
                return Some(op);
            }
            pick -= w;
        }
        None
    }

    /// Canonical text form accepted by [`OperatorSet::parse`].
    pub fn to_spec(&self) -> String {
        self.entries
            .iter()
            .filter(|e| e.1 > 0)
            .map(|&(op, w)| if w == 1 { op.symbol().to_string() } else { format!("{}*{}", op.symbol(), w) })
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parse_round_trips() {
        let set = OperatorSet::parse("+,-,*,/,sin,shift*3").unwrap();
        assert_eq!(set.to_spec(), "+,-,*,/,sin,shift*3");
        assert_eq!(OperatorSet::parse(&set.to_spec()).unwrap(), set);
        let d = OperatorSet::default();
        assert_eq!(OperatorSet::parse(&d.to_spec()).unwrap(), d);
    }

    #[test]
    fn only_shift_is_rejected() {
        assert!(OperatorSet::parse("shift").is_err());
        assert!(OperatorSet::parse("").is_err());
        assert!(OperatorSet::parse("+,tanh").is_err());
    }

    #[test]
    fn sampling_respects_weights() {
        let set = OperatorSet::parse("+,shift*3").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let shifts = (0..4000).filter(|_| set.sample(&mut rng).is_shift()).count();
        assert!((2800..3200).contains(&shifts), "{shifts}");
        let unary = set.sample_where(&mut rng, |op| op.arity() == 2 && !op.is_shift());
        assert_eq!(unary, Some(Operator::Add));
        assert_eq!(set.sample_where(&mut rng, |op| op == Operator::Sin), None);
    }

    #[test]
    fn apply_matches_definitions() {
        assert_eq!(Operator::Sub.apply(&[5.0, 2.0]), 3.0);
        assert_eq!(Operator::Pow.apply(&[2.0, 3.0]), 8.0);
        assert!(Operator::Log.apply(&[-1.0]).is_nan());
        assert!(Operator::Div.apply(&[1.0, 0.0]).is_infinite());
    }
}
