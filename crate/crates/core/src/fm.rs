//! Fourier–Motzkin elimination over ordered Q-vector spaces extending Q,
//! used as an independent ground truth for everything the sampling
//! pipeline decides.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::numbers::{LaurentNumber, Rational};
use crate::syntax::{Atom, Language, PlhCostFunction, Rel, Term, Threshold, Var, VcspInstance};

/// `Σ coeffs[v]·x_v  op  bound`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LinearConstraint {
    pub coeffs: BTreeMap<Var, Rational>,
    pub op: Rel,
    pub bound: LaurentNumber,
}

impl LinearConstraint {
    pub fn new(coeffs: BTreeMap<Var, Rational>, op: Rel, bound: LaurentNumber) -> Self {
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        LinearConstraint { coeffs, op, bound }
    }

    /// Ground truth of `True`/`False` is encoded as `0 ≤ 0` and `0 < 0`.
    pub fn from_atom(atom: &Atom) -> Self {
        Self::from_atom_mapped(atom, &|v| v)
    }

    /// As [`from_atom`](Self::from_atom), renaming variables through `map`.
    pub fn from_atom_mapped(atom: &Atom, map: &dyn Fn(Var) -> Var) -> Self {
        match atom {
            Atom::True => Self::new(BTreeMap::new(), Rel::Leq, LaurentNumber::zero()),
            Atom::False => Self::new(BTreeMap::new(), Rel::Lt, LaurentNumber::zero()),
            Atom::Cmp { lhs, op, rhs } => {
                let mut coeffs: BTreeMap<Var, Rational> = BTreeMap::new();
                let mut bound = LaurentNumber::zero();
                for (term, sign) in [(lhs, Rational::one()), (rhs, -Rational::one())] {
                    match term {
                        Term::Scaled { coeff, var } => {
                            *coeffs.entry(map(*var)).or_insert_with(Rational::zero) += coeff * &sign;
                        }
                        Term::Const(k) => bound = &bound - &k.scale(&sign),
                    }
                }
                Self::new(coeffs, *op, bound)
            }
        }
    }

    pub fn is_ground(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn lhs_at(&self, point: &[LaurentNumber]) -> LaurentNumber {
        let mut acc = LaurentNumber::zero();
        for (v, c) in &self.coeffs {
            acc += &point[*v].scale(c);
        }
        acc
    }

    pub fn holds_at(&self, point: &[LaurentNumber]) -> bool {
        self.op.holds(self.lhs_at(point).cmp(&self.bound))
    }

    fn ground_holds(&self) -> bool {
        self.op.holds(LaurentNumber::zero().cmp(&self.bound))
    }

    fn scale(&self, q: &Rational) -> (BTreeMap<Var, Rational>, LaurentNumber) {
        (
            self.coeffs.iter().map(|(v, c)| (*v, c * q)).collect(),
            self.bound.scale(q),
        )
    }

    /// Divides through by the absolute value of the first coefficient so that
    /// parallel constraints share their coefficient map.
    fn normalized(mut self) -> Self {
        if let Some(lead) = self.coeffs.values().next().map(Signed::abs) {
            if !lead.is_one() {
                let inv = lead.recip();
                let (coeffs, bound) = self.scale(&inv);
                self.coeffs = coeffs;
                self.bound = bound;
            }
        }
        self
    }
}

/// `x = Σ coeffs·y + constant`, recorded by equality elimination.
#[derive(Clone, Debug)]
struct Substitution {
    var: Var,
    coeffs: BTreeMap<Var, Rational>,
    constant: LaurentNumber,
}

impl Substitution {
    fn apply(&self, c: &LinearConstraint) -> LinearConstraint {
        let Some(a) = c.coeffs.get(&self.var) else {
            return c.clone();
        };
        let mut coeffs = c.coeffs.clone();
        coeffs.remove(&self.var);
        for (v, k) in &self.coeffs {
            *coeffs.entry(*v).or_insert_with(Rational::zero) += a * k;
        }
        LinearConstraint::new(coeffs, c.op, &c.bound - &self.constant.scale(a))
    }

    fn value_at(&self, point: &[LaurentNumber]) -> LaurentNumber {
        let mut acc = self.constant.clone();
        for (v, k) in &self.coeffs {
            acc += &point[*v].scale(k);
        }
        acc
    }
}

enum Step {
    Gauss(Substitution),
    /// The constraints mentioning `var` at the moment it was eliminated.
    Project(Var, Vec<LinearConstraint>),
}

struct Elimination {
    steps: Vec<Step>,
    residual: Vec<LinearConstraint>,
}

/// Keeps, for each coefficient map, only the tightest bound; decides ground
/// constraints. `None` when some ground constraint fails.
fn tighten(cs: Vec<LinearConstraint>) -> Option<Vec<LinearConstraint>> {
    let mut eqs: Vec<LinearConstraint> = Vec::new();
    let mut best: HashMap<BTreeMap<Var, Rational>, (LaurentNumber, Rel)> = HashMap::new();
    let mut order: Vec<BTreeMap<Var, Rational>> = Vec::new();
    for c in cs {
        if c.is_ground() {
            if !c.ground_holds() {
                return None;
            }
            continue;
        }
        let c = c.normalized();
        if c.op == Rel::Eq {
            if !eqs.contains(&c) {
                eqs.push(c);
            }
            continue;
        }
        match best.get_mut(&c.coeffs) {
            Some((b, op)) => {
                if c.bound < *b || (c.bound == *b && c.op == Rel::Lt) {
                    *b = c.bound;
                    *op = c.op;
                }
            }
            None => {
                order.push(c.coeffs.clone());
                best.insert(c.coeffs, (c.bound, c.op));
            }
        }
    }
    for coeffs in order {
        let (bound, op) = best.remove(&coeffs).unwrap();
        eqs.push(LinearConstraint { coeffs, op, bound });
    }
    Some(eqs)
}

/// Eliminates the variables of `order` (equalities first, then projection
/// in the given order). `None` when the system is found infeasible.
fn eliminate(cs: &[LinearConstraint], order: &[Var]) -> Option<Elimination> {
    let mut cs = tighten(cs.to_vec())?;
    let mut steps = Vec::new();
    let mut remaining: Vec<Var> = order.to_vec();

    loop {
        let pick = cs.iter().enumerate().find_map(|(i, c)| {
            (c.op == Rel::Eq)
                .then(|| remaining.iter().find(|v| c.coeffs.contains_key(v)).map(|v| (i, *v)))
                .flatten()
        });
        let Some((i, var)) = pick else { break };
        let eq = cs.swap_remove(i);
        let a = eq.coeffs[&var].clone();
        let coeffs = eq
            .coeffs
            .iter()
            .filter(|(v, _)| **v != var)
            .map(|(v, c)| (*v, -(c / &a)))
            .collect();
        let sub = Substitution {
            var,
            coeffs,
            constant: eq.bound.scale(&a.recip()),
        };
        cs = tighten(cs.iter().map(|c| sub.apply(c)).collect())?;
        remaining.retain(|v| *v != var);
        steps.push(Step::Gauss(sub));
    }

    for var in remaining {
        let (with, without): (Vec<_>, Vec<_>) =
            cs.into_iter().partition(|c| c.coeffs.contains_key(&var));
        let (lower, upper): (Vec<&LinearConstraint>, Vec<&LinearConstraint>) =
            with.iter().partition(|c| c.coeffs[&var].is_negative());
        let mut next = without;
        for l in &lower {
            for u in &upper {
                let (a1, a2) = (&l.coeffs[&var], &u.coeffs[&var]);
                let (lc, lb) = l.scale(a2);
                let (uc, ub) = u.scale(&-a1);
                let mut coeffs = lc;
                for (v, c) in uc {
                    *coeffs.entry(v).or_insert_with(Rational::zero) += c;
                }
                coeffs.remove(&var);
                let op = if l.op == Rel::Lt || u.op == Rel::Lt {
                    Rel::Lt
                } else {
                    Rel::Leq
                };
                next.push(LinearConstraint::new(coeffs, op, lb + ub));
            }
        }
        cs = tighten(next)?;
        steps.push(Step::Project(var, with));
    }
    Some(Elimination {
        steps,
        residual: cs,
    })
}

/// Bounds on a single variable implied by constraints in which every other
/// variable already has a value.
fn interval(var: Var, cs: &[LinearConstraint], point: &[LaurentNumber]) -> Bounds {
    let mut b = Bounds::default();
    for c in cs {
        let a = &c.coeffs[&var];
        let mut rest = c.bound.clone();
        for (v, k) in &c.coeffs {
            if *v != var {
                rest = &rest - &point[*v].scale(k);
            }
        }
        let value = rest.scale(&a.recip());
        let strict = c.op == Rel::Lt;
        match c.op {
            Rel::Eq => {
                b.raise(value.clone(), false);
                b.lower_to(value, false);
            }
            _ if a.is_positive() => b.lower_to(value, strict),
            _ => b.raise(value, strict),
        }
    }
    b
}

#[derive(Default, Debug)]
struct Bounds {
    lower: Option<(LaurentNumber, bool)>,
    upper: Option<(LaurentNumber, bool)>,
}

impl Bounds {
    fn raise(&mut self, v: LaurentNumber, strict: bool) {
        match &self.lower {
            Some((l, s)) if *l > v || (*l == v && (*s || !strict)) => {}
            _ => self.lower = Some((v, strict)),
        }
    }

    fn lower_to(&mut self, v: LaurentNumber, strict: bool) {
        match &self.upper {
            Some((u, s)) if *u < v || (*u == v && (*s || !strict)) => {}
            _ => self.upper = Some((v, strict)),
        }
    }

    fn feasible(&self) -> bool {
        match (&self.lower, &self.upper) {
            (Some((l, ls)), Some((u, us))) => l < u || (l == u && !ls && !us),
            _ => true,
        }
    }

    /// The midpoint rule: `(L+U)/2`, `L+1`, `U−1` or `0`.
    fn pick(&self) -> LaurentNumber {
        let one = LaurentNumber::one();
        match (&self.lower, &self.upper) {
            (Some((l, _)), Some((u, _))) => (l + u).scale(&Rational::new(1.into(), 2.into())),
            (Some((l, _)), None) => l + &one,
            (None, Some((u, _))) => u - &one,
            (None, None) => LaurentNumber::zero(),
        }
    }
}

fn vars_of(cs: &[LinearConstraint]) -> Vec<Var> {
    let mut vs: Vec<Var> = cs.iter().flat_map(|c| c.coeffs.keys().copied()).collect();
    vs.sort_unstable();
    vs.dedup();
    vs
}

/// Decides a conjunction of linear constraints over `num_vars` variables;
/// on success returns a witness (checked against every constraint).
pub fn fm_satisfiable(cs: &[LinearConstraint], num_vars: usize) -> Option<Vec<LaurentNumber>> {
    fm_satisfiable_with_order(cs, num_vars, &vars_of(cs))
}

/// As [`fm_satisfiable`], eliminating variables in the given order. The
/// order must list every variable that occurs in `cs`.
pub fn fm_satisfiable_with_order(
    cs: &[LinearConstraint],
    num_vars: usize,
    order: &[Var],
) -> Option<Vec<LaurentNumber>> {
    let width = num_vars.max(vars_of(cs).last().map_or(0, |v| v + 1));
    let elim = eliminate(cs, order)?;
    assert!(
        elim.residual.is_empty(),
        "elimination order misses variables of the system"
    );
    let mut point = vec![LaurentNumber::zero(); width];
    for step in elim.steps.iter().rev() {
        match step {
            Step::Project(var, with) => {
                let b = interval(*var, with, &point);
                assert!(b.feasible(), "back-substitution met an empty interval");
                point[*var] = b.pick();
            }
            Step::Gauss(sub) => point[sub.var] = sub.value_at(&point),
        }
    }
    for c in cs {
        assert!(c.holds_at(&point), "witness violates {c:?}");
    }
    point.truncate(num_vars.max(width));
    Some(point)
}

/// Result of a minimization: the infimum of a linear objective, or of a
/// whole instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Infimum {
    Infeasible,
    MinusInfinity,
    Value { value: LaurentNumber, attained: bool },
}

impl Infimum {
    /// Is there a solution of cost at most `threshold`? An absent or infinite
    /// threshold asks for feasibility.
    pub fn meets(&self, threshold: &Threshold) -> bool {
        match (self, threshold) {
            (Infimum::Infeasible, _) => false,
            (_, Threshold::Absent | Threshold::Infinite) => true,
            (Infimum::MinusInfinity, _) => true,
            (Infimum::Value { value, attained }, Threshold::Value(u)) => {
                let u = LaurentNumber::from_rational(u.clone());
                *value < u || (*value == u && *attained)
            }
        }
    }

    /// The better of two infima; equal values are attained if either is.
    pub fn best(self, other: Infimum) -> Infimum {
        use Infimum::*;
        match (self, other) {
            (Infeasible, x) | (x, Infeasible) => x,
            (MinusInfinity, _) | (_, MinusInfinity) => MinusInfinity,
            (
                Value {
                    value: a,
                    attained: sa,
                },
                Value {
                    value: b,
                    attained: sb,
                },
            ) => match a.cmp(&b) {
                std::cmp::Ordering::Less => Value {
                    value: a,
                    attained: sa,
                },
                std::cmp::Ordering::Greater => Value {
                    value: b,
                    attained: sb,
                },
                std::cmp::Ordering::Equal => Value {
                    value: a,
                    attained: sa || sb,
                },
            },
        }
    }
}

/// Infimum of `Σ objective[v]·x_v` subject to `cs`.
pub fn linear_infimum(
    objective: &BTreeMap<Var, Rational>,
    cs: &[LinearConstraint],
    num_vars: usize,
) -> Infimum {
    let mut vars = vars_of(cs);
    vars.extend(objective.keys().copied());
    vars.sort_unstable();
    vars.dedup();
    let t = vars.last().map_or(0, |v| v + 1).max(num_vars);
    let mut system = cs.to_vec();
    let mut def: BTreeMap<Var, Rational> = objective.iter().map(|(v, c)| (*v, -c)).collect();
    def.insert(t, Rational::one());
    system.push(LinearConstraint::new(def, Rel::Eq, LaurentNumber::zero()));

    let Some(elim) = eliminate(&system, &vars) else {
        return Infimum::Infeasible;
    };
    let mut point = vec![LaurentNumber::zero(); t + 1];
    point[t] = LaurentNumber::zero();
    let b = interval(t, &elim.residual, &point);
    if !b.feasible() {
        return Infimum::Infeasible;
    }
    match b.lower {
        None => Infimum::MinusInfinity,
        Some((value, strict)) => Infimum::Value {
            value,
            attained: !strict,
        },
    }
}

/// Fails with [`Error::OverlappingGuards`] when two pieces of `f` can hold at
/// the same point.
pub fn check_guards_disjoint(f: &PlhCostFunction) -> Result<()> {
    for (i, p) in f.pieces.iter().enumerate() {
        for (j, q) in f.pieces.iter().enumerate().skip(i + 1) {
            let cs: Vec<LinearConstraint> = p
                .guard
                .iter()
                .chain(&q.guard)
                .map(LinearConstraint::from_atom)
                .collect();
            if fm_satisfiable(&cs, f.arity).is_some() {
                return Err(Error::OverlappingGuards {
                    name: f.name.clone(),
                    first: i,
                    second: j,
                });
            }
        }
    }
    Ok(())
}

/// Ground truth for an instance: enumerates one piece per summand, pruning
/// infeasible partial selections, and minimizes each selection's linear
/// objective exactly.
pub fn vcsp_oracle(instance: &VcspInstance, language: &Language, limits: &Limits) -> Result<Infimum> {
    instance.validate_against(language)?;
    if instance.summands.len() > limits.max_oracle_summands {
        return Err(Error::ResourceLimit(format!(
            "the piece-enumeration oracle handles at most {} summands, got {}",
            limits.max_oracle_summands,
            instance.summands.len()
        )));
    }
    let functions: Vec<&PlhCostFunction> = instance
        .summands
        .iter()
        .map(|s| language.require(&s.function))
        .collect::<Result<_>>()?;
    let mut search = OracleSearch {
        instance,
        functions,
        constraints: Vec::new(),
        objective: BTreeMap::new(),
        offset: LaurentNumber::zero(),
        best: Infimum::Infeasible,
    };
    search.descend(0);
    Ok(search.best)
}

struct OracleSearch<'a> {
    instance: &'a VcspInstance,
    functions: Vec<&'a PlhCostFunction>,
    constraints: Vec<LinearConstraint>,
    objective: BTreeMap<Var, Rational>,
    offset: LaurentNumber,
    best: Infimum,
}

impl OracleSearch<'_> {
    fn descend(&mut self, level: usize) {
        if self.best == Infimum::MinusInfinity {
            return;
        }
        if level == self.functions.len() {
            let result = match linear_infimum(&self.objective, &self.constraints, self.instance.num_vars) {
                Infimum::Value { value, attained } => Infimum::Value {
                    value: &value + &self.offset,
                    attained,
                },
                other => other,
            };
            self.best = std::mem::replace(&mut self.best, Infimum::Infeasible).best(result);
            return;
        }
        let args = self.instance.summands[level].args.clone();
        let map = move |v: Var| args[v];
        for piece in &self.functions[level].pieces {
            let mark = self.constraints.len();
            self.constraints
                .extend(piece.guard.iter().map(|a| LinearConstraint::from_atom_mapped(a, &map)));
            if fm_satisfiable(&self.constraints, self.instance.num_vars).is_some() {
                let saved = (self.objective.clone(), self.offset.clone());
                match &piece.value {
                    Term::Scaled { coeff, var } => {
                        *self.objective.entry(map(*var)).or_insert_with(Rational::zero) += coeff;
                    }
                    Term::Const(k) => self.offset += k,
                }
                self.descend(level + 1);
                (self.objective, self.offset) = saved;
            }
            self.constraints.truncate(mark);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{rat, ratio};

    fn lc(coeffs: &[(Var, i64)], op: Rel, bound: i64) -> LinearConstraint {
        LinearConstraint::new(
            coeffs.iter().map(|(v, c)| (*v, rat(*c))).collect(),
            op,
            LaurentNumber::from_int(bound),
        )
    }

    #[test]
    fn midpoint_witness_between_fixed_bounds() {
        // y = 0, z = 1, y < x < z
        let cs = vec![
            lc(&[(1, 1)], Rel::Eq, 0),
            lc(&[(2, 1)], Rel::Eq, 1),
            lc(&[(1, 1), (0, -1)], Rel::Lt, 0),
            lc(&[(0, 1), (2, -1)], Rel::Lt, 0),
        ];
        let w = fm_satisfiable(&cs, 3).unwrap();
        assert_eq!(w[0], LaurentNumber::from_rational(ratio(1, 2)));
    }

    #[test]
    fn strict_self_comparison_is_unsat() {
        let a = Atom::lt(Term::var(0), Term::var(0));
        assert!(fm_satisfiable(&[LinearConstraint::from_atom(&a)], 1).is_none());
    }

    #[test]
    fn infinitesimal_constants_propagate() {
        let cs = vec![
            LinearConstraint::from_atom(&Atom::eq(Term::var(0), Term::constant(LaurentNumber::epsilon()))),
            LinearConstraint::from_atom(&Atom::lt(Term::rational(rat(0)), Term::var(0))),
        ];
        assert_eq!(fm_satisfiable(&cs, 1).unwrap()[0], LaurentNumber::epsilon());
    }

    #[test]
    fn linear_infimum_cases() {
        let x: BTreeMap<Var, Rational> = [(0, rat(1))].into();
        let neg_x: BTreeMap<Var, Rational> = [(0, rat(-1))].into();
        assert_eq!(linear_infimum(&x, &[], 1), Infimum::MinusInfinity);
        assert_eq!(
            linear_infimum(&neg_x, &[lc(&[(0, 1)], Rel::Lt, 1)], 1),
            Infimum::Value {
                value: LaurentNumber::from_int(-1),
                attained: false
            }
        );
        assert_eq!(
            linear_infimum(&x, &[lc(&[(0, 1)], Rel::Eq, 2)], 1),
            Infimum::Value {
                value: LaurentNumber::from_int(2),
                attained: true
            }
        );
        assert_eq!(
            linear_infimum(&x, &[lc(&[(0, 1)], Rel::Lt, 0), lc(&[(0, -1)], Rel::Lt, 0)], 1),
            Infimum::Infeasible
        );
    }

    #[test]
    fn constant_objective_with_constraints() {
        let empty = BTreeMap::new();
        assert_eq!(
            linear_infimum(&empty, &[lc(&[(0, 1)], Rel::Lt, 1)], 1),
            Infimum::Value {
                value: LaurentNumber::zero(),
                attained: true
            }
        );
    }

    #[test]
    fn threshold_semantics() {
        let v = Infimum::Value {
            value: LaurentNumber::zero(),
            attained: false,
        };
        assert!(!v.meets(&Threshold::Value(rat(0))));
        assert!(v.meets(&Threshold::Value(ratio(1, 100))));
        assert!(Infimum::MinusInfinity.meets(&Threshold::Value(rat(-1_000_000))));
        assert!(!Infimum::Infeasible.meets(&Threshold::Infinite));
    }
}
