//! Random spawning, repair, crossover and mutation of stack models.

use std::f64::consts::{E, PI};

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::model::{Replay, StackModel, Terminal};
use super::operator::{Operator, OperatorSet};

/// The building blocks available for a problem: operators and input width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Primitives {
    pub operators: OperatorSet,
    pub dims: usize,
    /// Upper bound on the operator count of a freshly spawned model.
    pub max_spawn_ops: usize,
}

impl Primitives {
    pub fn new(operators: OperatorSet, dims: usize) -> Self {
        Primitives { operators, dims, max_spawn_ops: 10 }
    }

    pub fn random_variable<R: Rng + ?Sized>(&self, rng: &mut R) -> Terminal {
        Terminal::Var(rng.random_range(0..self.dims))
    }

    /// A constant drawn from {π, e, integer in [-3, 3], real in [-10, 10]}.
    pub fn random_constant<R: Rng + ?Sized>(&self, rng: &mut R) -> Terminal {
        let c = match rng.random_range(0..4) {
            0 => PI,
            1 => E,
            2 => rng.random_range(-3i32..=3) as f64,
            _ => rng.random_range(-10.0..=10.0),
        };
        Terminal::Const(c)
    }

    /// Each variable and each of the four constant kinds is equally likely.
    pub fn random_terminal<R: Rng + ?Sized>(&self, rng: &mut R) -> Terminal {
        if rng.random_range(0..self.dims + 4) < self.dims {
            self.random_variable(rng)
        } else {
            self.random_constant(rng)
        }
    }

    /// A fresh random model that uses at least one input variable.
    pub fn spawn<R: Rng + ?Sized>(&self, rng: &mut R) -> StackModel {
        let n_ops = rng.random_range(1..=self.max_spawn_ops.max(1));
        let ops: Vec<Operator> = (0..n_ops).map(|_| self.operators.sample(rng)).collect();
        let demand = Replay::of(&ops).demand;
        let mut data: Vec<Terminal> = (0..demand).map(|_| self.random_terminal(rng)).collect();
        if !data.iter().any(|t| t.is_var()) {
            let i = rng.random_range(0..data.len());
            data[i] = self.random_variable(rng);
        }
        StackModel::new(ops, data)
    }

    pub fn is_valid(&self, model: &StackModel) -> bool {
        model.is_feasible()
            && model.ops.iter().all(|&op| self.operators.contains(op))
            && model.data.iter().all(|t| match *t {
                Terminal::Var(i) => i < self.dims,
                Terminal::Const(c) => c.is_finite(),
            })
    }
}

/// Makes a model executable: whenever an operator would run out of
/// terminals, random terminals are pushed onto the top of the remaining data
/// stack. Operators are never removed; a feasible model is returned as is.
pub fn repair<R: Rng + ?Sized>(mut model: StackModel, prims: &Primitives, rng: &mut R) -> StackModel {
    let mut changed = false;
    if model.ops.is_empty() {
        if model.data.is_empty() {
            model.data.push(prims.random_variable(rng));
            changed = true;
        }
    } else {
        let replay = model.replay();
        for (&start, &draws) in replay.starts.iter().zip(&replay.draws) {
            while start + draws > model.data.len() {
                let at = start.min(model.data.len());
                model.data.insert(at, prims.random_terminal(rng));
                changed = true;
            }
        }
    }
    if changed {
        model.reset_scores();
    }
    model
}

/// Drops trailing terminals that no operator consumes.
pub fn trim(mut model: StackModel) -> StackModel {
    let demand = model.replay().demand;
    if model.data.len() > demand {
        model.data.truncate(demand);
        model.reset_scores();
    }
    model
}

fn normalize<R: Rng + ?Sized>(model: StackModel, prims: &Primitives, rng: &mut R) -> StackModel {
    let mut m = trim(repair(model, prims, rng));
    m.reset_scores();
    m
}

/// Data-stack index where the operator at `cut` starts drawing.
fn data_pos(replay: &Replay, n_ops: usize, cut: usize) -> usize {
    if cut < n_ops {
        replay.starts[cut]
    } else {
        replay.draws.iter().sum()
    }
}

/// Two-point crossover at explicit cut points `[p, q)` in each parent's
/// operator stack. The operator segments and the terminals they consume are
/// swapped; both children are repaired.
pub fn crossover_at<R: Rng + ?Sized>(
    a: &StackModel,
    b: &StackModel,
    cuts_a: (usize, usize),
    cuts_b: (usize, usize),
    prims: &Primitives,
    rng: &mut R,
) -> (StackModel, StackModel) {
    let (pa, qa) = cuts_a;
    let (pb, qb) = cuts_b;
    assert!(pa <= qa && qa <= a.ops.len() && pb <= qb && qb <= b.ops.len(), "cut points out of range");
    let ra = a.replay();
    let rb = b.replay();
    let clip = |v: usize, len: usize| v.min(len);
    let (da0, da1) = (
        clip(data_pos(&ra, a.ops.len(), pa), a.data.len()),
        clip(data_pos(&ra, a.ops.len(), qa), a.data.len()),
    );
    let (db0, db1) = (
        clip(data_pos(&rb, b.ops.len(), pb), b.data.len()),
        clip(data_pos(&rb, b.ops.len(), qb), b.data.len()),
    );

    let splice = |x: &StackModel, (p, q): (usize, usize), (d0, d1): (usize, usize), y: &StackModel, (s, t): (usize, usize), (e0, e1): (usize, usize)| {
        let ops = [&x.ops[..p], &y.ops[s..t], &x.ops[q..]].concat();
        let data = [&x.data[..d0], &y.data[e0..e1], &x.data[d1..]].concat();
        StackModel::new(ops, data)
    };
    let c1 = splice(a, cuts_a, (da0, da1), b, cuts_b, (db0, db1));
    let c2 = splice(b, cuts_b, (db0, db1), a, cuts_a, (da0, da1));
    (normalize(c1, prims, rng), normalize(c2, prims, rng))
}

fn random_cuts<R: Rng + ?Sized>(len: usize, rng: &mut R) -> (usize, usize) {
    if len < 2 {
        return (0, 0);
    }
    let p = rng.random_range(0..=len);
    let mut q = rng.random_range(0..len);
    if q >= p {
        q += 1;
    }
    (p.min(q), p.max(q))
}

/// Two-point crossover with random cuts. A parent with fewer than two
/// operators contributes an empty segment.
pub fn crossover<R: Rng + ?Sized>(
    a: &StackModel,
    b: &StackModel,
    prims: &Primitives,
    rng: &mut R,
) -> (StackModel, StackModel) {
    let ca = random_cuts(a.ops.len(), rng);
    let cb = random_cuts(b.ops.len(), rng);
    crossover_at(a, b, ca, cb, prims, rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MutationForm {
    ReplaceVariable,
    ReplaceOperator,
    PushTop,
    PopTop,
    Insert,
    CrossWithRandom,
    AppendBottom,
}

impl MutationForm {
    pub const ALL: [MutationForm; 7] = [
        MutationForm::ReplaceVariable,
        MutationForm::ReplaceOperator,
        MutationForm::PushTop,
        MutationForm::PopTop,
        MutationForm::Insert,
        MutationForm::CrossWithRandom,
        MutationForm::AppendBottom,
    ];
}

fn apply_form<R: Rng + ?Sized>(
    form: MutationForm,
    model: &StackModel,
    prims: &Primitives,
    rng: &mut R,
) -> Option<StackModel> {
    let mut m = StackModel::new(model.ops.clone(), model.data.clone());
    match form {
        MutationForm::ReplaceVariable => {
            let vars: Vec<usize> = (0..m.data.len()).filter(|&i| m.data[i].is_var()).collect();
            let &i = vars.choose(rng)?;
            m.data[i] = prims.random_variable(rng);
        }
        MutationForm::ReplaceOperator => {
            if m.ops.is_empty() {
                return None;
            }
            let i = rng.random_range(0..m.ops.len());
            let old = m.ops[i];
            let new = prims
                .operators
                .sample_where(rng, |op| op != old && op.arity() == old.arity())
                .or_else(|| prims.operators.sample_where(rng, |op| op != old))?;
            m.ops[i] = new;
        }
        MutationForm::PushTop => {
            let op = prims.operators.sample(rng);
            m.ops.insert(0, op);
            if !op.is_shift() {
                for _ in 1..op.arity() {
                    m.data.insert(0, prims.random_terminal(rng));
                }
            }
        }
        MutationForm::PopTop => {
            if m.ops.is_empty() {
                return None;
            }
            let k = rng.random_range(1..=m.ops.len());
            let replay = m.replay();
            let consumed = data_pos(&replay, m.ops.len(), k).min(m.data.len());
            m.ops.drain(..k);
            m.data.drain(..consumed);
        }
        MutationForm::Insert => {
            let pos = rng.random_range(0..=m.ops.len());
            m.ops.insert(pos, prims.operators.sample(rng));
        }
        MutationForm::CrossWithRandom => {
            let other = prims.spawn(rng);
            return Some(crossover(&m, &other, prims, rng).0);
        }
        MutationForm::AppendBottom => {
            m.ops.push(prims.operators.sample(rng));
        }
    }
    Some(normalize(m, prims, rng))
}

/// Applies one of the seven mutation forms, chosen uniformly; forms that do
/// not apply to `model` are redrawn. Returns the form that was applied.
pub fn mutate_traced<R: Rng + ?Sized>(
    model: &StackModel,
    prims: &Primitives,
    rng: &mut R,
) -> (StackModel, MutationForm) {
    loop {
        let form = *MutationForm::ALL.choose(rng).expect("non-empty");
        if let Some(m) = apply_form(form, model, prims, rng) {
            return (m, form);
        }
    }
}

pub fn mutate<R: Rng + ?Sized>(model: &StackModel, prims: &Primitives, rng: &mut R) -> StackModel {
    mutate_traced(model, prims, rng).0
}

/// Applies a specific form, or `None` when it does not apply.
pub fn mutate_with<R: Rng + ?Sized>(
    form: MutationForm,
    model: &StackModel,
    prims: &Primitives,
    rng: &mut R,
) -> Option<StackModel> {
    apply_form(form, model, prims, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::Operator::*;
    use crate::gp::Terminal::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn prims(dims: usize) -> Primitives {
        Primitives::new(OperatorSet::default(), dims)
    }

    #[test]
    fn repair_adds_missing_operand() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = repair(StackModel::new(vec![Add], vec![Var(0)]), &prims(1), &mut rng);
        assert_eq!(m.data.len(), 2);
        assert!(m.is_feasible());
    }

    #[test]
    fn repair_fills_empty_data_for_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = repair(StackModel::new(vec![Add, Add, Add], vec![]), &prims(2), &mut rng);
        assert_eq!(m.data.len(), 4);
    }

    #[test]
    fn repair_leaves_feasible_model_alone() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = StackModel::new(vec![Add, Sin], vec![Var(0), Const(2.0), Var(0)]);
        let r = repair(m.clone(), &prims(1), &mut rng);
        assert_eq!(r, m);
        assert_eq!(r.data.len(), 3);
    }

    #[test]
    fn self_crossover_with_matching_cuts_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = prims(2);
        for _ in 0..200 {
            let m = p.spawn(&mut rng);
            let n = m.ops.len();
            let a = rng.random_range(0..=n);
            let b = rng.random_range(0..=n);
            let cuts = (a.min(b), a.max(b));
            let (c1, c2) = crossover_at(&m, &m, cuts, cuts, &p, &mut rng);
            assert_eq!(c1, m);
            assert_eq!(c2, m);
        }
    }

    #[test]
    fn crossover_never_introduces_foreign_operators() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pa = Primitives::new(OperatorSet::new(&[Add, Sin]).unwrap(), 2);
        let pb = Primitives::new(OperatorSet::new(&[Mul, Cos]).unwrap(), 2);
        let union = Primitives::new(OperatorSet::new(&[Add, Sin, Mul, Cos]).unwrap(), 2);
        for _ in 0..200 {
            let a = pa.spawn(&mut rng);
            let b = pb.spawn(&mut rng);
            let (c1, c2) = crossover(&a, &b, &union, &mut rng);
            for c in [c1, c2] {
                assert!(c.ops.iter().all(|op| [Add, Sin, Mul, Cos].contains(op)));
                assert!(c.is_feasible());
            }
        }
    }

    #[test]
    fn single_operator_parent_donates_at_most_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = prims(1);
        let a = StackModel::new(vec![Sin], vec![Var(0)]);
        for _ in 0..200 {
            let b = p.spawn(&mut rng);
            let (_, child_b) = crossover(&a, &b, &p, &mut rng);
            let gained = child_b.ops.iter().filter(|&&op| op == Sin).count()
                - b.ops.iter().filter(|&&op| op == Sin).count().min(child_b.ops.iter().filter(|&&op| op == Sin).count());
            assert!(gained <= 1);
            assert!(child_b.ops.len() <= b.ops.len() + 1);
        }
    }

    #[test]
    fn replace_variable_with_single_input_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = StackModel::new(vec![Add], vec![Var(0), Const(1.5)]);
        let out = mutate_with(MutationForm::ReplaceVariable, &m, &prims(1), &mut rng).unwrap();
        assert_eq!(out, m);
        let no_vars = StackModel::new(vec![Sin], vec![Const(1.0)]);
        assert!(mutate_with(MutationForm::ReplaceVariable, &no_vars, &prims(1), &mut rng).is_none());
    }

    #[test]
    fn popping_every_operator_leaves_one_terminal() {
        let p = prims(2);
        let m = StackModel::new(vec![Add, Mul], vec![Var(0), Var(1), Const(2.0)]);
        for seed in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = mutate_with(MutationForm::PopTop, &m, &p, &mut rng).unwrap();
            assert!(out.ops.len() < 2);
            if out.ops.is_empty() {
                assert_eq!(out.data.len(), 1);
            }
            assert!(out.is_feasible());
        }
    }

    #[test]
    fn forms_are_chosen_uniformly() {
        let p = prims(2);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // Every form applies to this model, so no redraws happen.
        let m = StackModel::new(vec![Add, Mul, Sin], vec![Var(0), Var(1), Const(2.0)]);
        let mut counts: HashMap<MutationForm, usize> = HashMap::new();
        for _ in 0..7000 {
            *counts.entry(mutate_traced(&m, &p, &mut rng).1).or_default() += 1;
        }
        for form in MutationForm::ALL {
            let c = counts.get(&form).copied().unwrap_or(0);
            assert!((850..=1150).contains(&c), "{form:?}: {c}");
        }
    }

    #[test]
    fn spawned_models_are_valid_and_use_a_variable() {
        let p = prims(3);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..1000 {
            let m = p.spawn(&mut rng);
            assert!(p.is_valid(&m));
            assert!(m.data.iter().any(|t| t.is_var()));
            assert_eq!(m.data.len(), m.replay().demand);
        }
    }
}
