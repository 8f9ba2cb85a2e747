//! Max-closed CSPs: sample the domain and propagate upper bounds over it.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::numbers::{concretize_epsilon, LaurentNumber, Rational};
use crate::qe::{decide_sentence, eliminate_quantifiers};
use crate::sampler::{build_csp_sample, AtomSet, SampleDomain};
use crate::syntax::{Atom, FoFormula, QfFormula, RelationDef, RelationSet, Term, Var, VcspInstance};
use crate::tables::{AtomTable, TableFormula};

/// A relation over a sample, as tuples of element indices.
#[derive(Clone, Debug)]
pub struct FiniteRelation {
    pub name: String,
    pub arity: usize,
    domain_size: usize,
    /// Flat, lexicographically sorted tuples.
    tuples: Vec<u32>,
    member: Vec<bool>,
}

impl FiniteRelation {
    fn offset(&self, tuple: &[u32]) -> usize {
        tuple.iter().fold(0, |acc, &i| acc * self.domain_size + i as usize)
    }

    pub fn len(&self) -> usize {
        self.tuples.len() / self.arity.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> impl Iterator<Item = &[u32]> {
        self.tuples.chunks(self.arity.max(1))
    }

    pub fn contains(&self, tuple: &[u32]) -> bool {
        self.member[self.offset(tuple)]
    }
}

/// Materializes `defn` over `sample^arity`.
pub fn interpret_relation(
    name: &str,
    defn: &QfFormula,
    arity: usize,
    sample: &SampleDomain,
    limits: &Limits,
) -> Result<FiniteRelation> {
    if !defn.is_positive() {
        return Err(Error::Invalid(format!("definition of `{name}` is not negation-free")));
    }
    if arity > limits.max_relation_arity {
        return Err(Error::ResourceLimit(format!(
            "relation `{name}` has arity {arity}, above the cap of {}",
            limits.max_relation_arity
        )));
    }
    let n = sample.len();
    let total = limits.check_enumeration(&format!("tuples of `{name}`"), n, arity)? as usize;
    let mut atoms = Vec::new();
    let mut tables = Vec::new();
    let formula = TableFormula::compile(defn, sample.elements(), &mut atoms, &mut tables);
    let mut tuples = Vec::new();
    let mut member = vec![false; total];
    let mut digits = vec![0usize; arity];
    for (idx, slot) in member.iter_mut().enumerate() {
        let mut rest = idx;
        for d in digits.iter_mut().rev() {
            *d = rest % n;
            rest /= n;
        }
        if formula.holds(&tables, &|v: Var| digits[v]) {
            *slot = true;
            tuples.extend(digits.iter().map(|&d| d as u32));
        }
    }
    Ok(FiniteRelation {
        name: name.to_string(),
        arity,
        domain_size: n,
        tuples,
        member,
    })
}

/// The first pair of tuples whose componentwise max (or, with `with_min`,
/// min) leaves the relation.
pub fn check_max_closed(rel: &FiniteRelation, with_min: bool) -> Option<(Vec<u32>, Vec<u32>)> {
    let tuples: Vec<&[u32]> = rel.tuples().collect();
    let mut buf = vec![0u32; rel.arity];
    for (i, a) in tuples.iter().enumerate() {
        for b in &tuples[i + 1..] {
            for (k, slot) in buf.iter_mut().enumerate() {
                *slot = a[k].max(b[k]);
            }
            if !rel.contains(&buf) {
                return Some((a.to_vec(), b.to_vec()));
            }
            if with_min {
                for (k, slot) in buf.iter_mut().enumerate() {
                    *slot = a[k].min(b[k]);
                }
                if !rel.contains(&buf) {
                    return Some((a.to_vec(), b.to_vec()));
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CspOutcome {
    Unsat,
    Sat { witness: Vec<LaurentNumber> },
}

impl CspOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, CspOutcome::Sat { .. })
    }
}

/// A relation definition reduced to a negation-free quantifier-free formula.
#[derive(Clone, Debug)]
struct Prepared {
    name: String,
    arity: usize,
    qf: QfFormula,
}

/// Tuple budget for the sample on which max-closure of a relation is checked.
const CLOSURE_CHECK_TUPLES: u64 = 20_000;

/// Solver for a fixed set of relations, each verified max-closed up front.
#[derive(Clone, Debug)]
pub struct CspSolver {
    relations: Vec<Prepared>,
    limits: Limits,
}

impl CspSolver {
    pub fn new(relations: &RelationSet, limits: &Limits) -> Result<Self> {
        let mut prepared = Vec::new();
        for r in &relations.relations {
            let p = prepare(r, limits)?;
            verify_max_closed(&p, limits)?;
            prepared.push(p);
        }
        Ok(CspSolver {
            relations: prepared,
            limits: limits.clone(),
        })
    }

    fn relation(&self, name: &str) -> Result<&Prepared> {
        self.relations
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    /// `At(τ)` for the relations the instance uses.
    pub fn atoms_for(&self, instance: &VcspInstance) -> Result<AtomSet> {
        let mut set = AtomSet::new();
        for name in instance.used_functions() {
            set.extend(self.relation(name)?.qf.atoms());
        }
        Ok(set)
    }

    pub fn sample_for(&self, instance: &VcspInstance) -> Result<SampleDomain> {
        Ok(build_csp_sample(&self.atoms_for(instance)?, instance.num_vars.max(1)))
    }

    pub fn solve(&self, instance: &VcspInstance) -> Result<CspOutcome> {
        for s in &instance.summands {
            instance.check_summand(s, self.relation(&s.function)?.arity)?;
        }
        let sample = self.sample_for(instance)?;
        self.limits.check_sample_size(sample.len())?;
        let elements = sample.elements();
        let mut atoms = Vec::new();
        let mut tables = Vec::new();
        let mut formulas: Vec<(&str, TableFormula)> = Vec::new();
        for name in instance.used_functions() {
            let r = self.relation(name)?;
            formulas.push((name, TableFormula::compile(&r.qf, elements, &mut atoms, &mut tables)));
        }
        let constraints: Vec<Constraint> = instance
            .summands
            .iter()
            .map(|s| Constraint {
                formula: &formulas.iter().find(|(n, _)| *n == s.function).unwrap().1,
                args: &s.args,
                vars: s.args.iter().copied().collect::<BTreeSet<_>>().into_iter().collect(),
            })
            .collect();
        let Some(upper) = propagate_upper_bounds(instance.num_vars, elements.len(), &constraints, &tables) else {
            return Ok(CspOutcome::Unsat);
        };
        let witness: Vec<LaurentNumber> = upper.iter().map(|&i| elements[i].clone()).collect();
        for s in &instance.summands {
            let r = self.relation(&s.function)?;
            let args: Vec<LaurentNumber> = s.args.iter().map(|v| witness[*v].clone()).collect();
            if !r.qf.evaluate(&args) {
                return Err(Error::Invariant(format!(
                    "maximum of the arc-consistent domains violates `{}`",
                    s.function
                )));
            }
        }
        Ok(CspOutcome::Sat { witness })
    }

    /// Rational values for a Laurent witness: `ε` is replaced by a rational
    /// small enough to keep every comparison the instance makes.
    pub fn rationalize(&self, instance: &VcspInstance, witness: &[LaurentNumber]) -> Result<Vec<Rational>> {
        let mut values: Vec<LaurentNumber> = witness.to_vec();
        let mut atoms: Vec<(Atom, Vec<Var>)> = Vec::new();
        for s in &instance.summands {
            for a in self.relation(&s.function)?.qf.atoms() {
                if let Atom::Cmp { lhs, rhs, .. } = a {
                    for t in [lhs, rhs] {
                        values.push(match t {
                            Term::Scaled { coeff, var } => witness[s.args[*var]].scale(coeff),
                            Term::Const(k) => k.clone(),
                        });
                    }
                }
                atoms.push((a.clone(), s.args.clone()));
            }
        }
        let eps = concretize_epsilon(&values);
        let out: Vec<Rational> = witness.iter().map(|w| w.evaluate_at(&eps)).collect();
        let lifted: Vec<LaurentNumber> = out.iter().cloned().map(LaurentNumber::from_rational).collect();
        for s in &instance.summands {
            let args: Vec<LaurentNumber> = s.args.iter().map(|v| lifted[*v].clone()).collect();
            if !self.relation(&s.function)?.qf.evaluate(&args) {
                return Err(Error::Invariant(format!(
                    "rationalized witness violates `{}`",
                    s.function
                )));
            }
        }
        Ok(out)
    }

    /// Independent decision: substitute the definitions, close existentially
    /// and eliminate every quantifier.
    pub fn decide_by_elimination(&self, instance: &VcspInstance) -> Result<bool> {
        let mut next = instance.num_vars;
        let mut parts = Vec::new();
        for s in &instance.summands {
            let r = self.relation(&s.function)?;
            instance.check_summand(s, r.arity)?;
            let atoms_free = FoFormula::from(r.qf.clone());
            parts.push(instantiate(&atoms_free, &s.args, &mut next));
        }
        let mut sentence = FoFormula::And(parts);
        for v in (0..instance.num_vars).rev() {
            sentence = FoFormula::exists(v, sentence);
        }
        let limits = Limits {
            max_qe_atoms: usize::MAX,
            ..self.limits.clone()
        };
        decide_sentence(&sentence, &limits)
    }
}

fn prepare(r: &RelationDef, limits: &Limits) -> Result<Prepared> {
    let unbounded = Limits {
        max_qe_atoms: limits.max_qe_atoms.max(r.formula.atom_count()),
        ..limits.clone()
    };
    let qf = eliminate_quantifiers(&r.formula, &unbounded)?;
    for a in qf.atoms() {
        for k in a.constants() {
            if !k.is_rational() {
                return Err(Error::NonRationalConstant(k.to_string()));
            }
        }
    }
    Ok(Prepared {
        name: r.name.clone(),
        arity: r.arity,
        qf,
    })
}

/// Checks max-closure on the relation's own CSP sample, using the largest
/// `d ≤ arity` whose tuple space stays within budget.
fn verify_max_closed(r: &Prepared, limits: &Limits) -> Result<()> {
    let atoms = AtomSet::from_atoms(r.qf.atoms());
    let mut d = r.arity.max(1);
    let mut sample = build_csp_sample(&atoms, d);
    while d > 1 && (sample.len() as u64).saturating_pow(r.arity as u32) > CLOSURE_CHECK_TUPLES {
        d -= 1;
        sample = build_csp_sample(&atoms, d);
    }
    let rel = interpret_relation(&r.name, &r.qf, r.arity, &sample, limits)?;
    if let Some((a, b)) = check_max_closed(&rel, false) {
        let show = |t: &[u32]| {
            let parts: Vec<String> = t.iter().map(|&i| sample.elements()[i as usize].to_string()).collect();
            format!("({})", parts.join(", "))
        };
        return Err(Error::NotMaxClosed {
            relation: r.name.clone(),
            detail: format!("max of {} and {} is not in the relation", show(&a), show(&b)),
        });
    }
    Ok(())
}

/// Renames a relation body onto instance variables: free variable `i`
/// becomes `args[i]`, bound variables get fresh indices from `next`.
fn instantiate(f: &FoFormula, args: &[Var], next: &mut Var) -> FoFormula {
    fn go(f: &FoFormula, map: &mut Vec<(Var, Var)>, args: &[Var], next: &mut Var) -> FoFormula {
        let lookup = |map: &Vec<(Var, Var)>, v: Var| {
            map.iter()
                .rev()
                .find(|(s, _)| *s == v)
                .map_or_else(|| args[v], |(_, t)| *t)
        };
        match f {
            FoFormula::Atom(a) => {
                let m = map.clone();
                FoFormula::Atom(a.rename(&|v| lookup(&m, v)))
            }
            FoFormula::And(fs) => FoFormula::And(fs.iter().map(|g| go(g, map, args, next)).collect()),
            FoFormula::Or(fs) => FoFormula::Or(fs.iter().map(|g| go(g, map, args, next)).collect()),
            FoFormula::Not(g) => FoFormula::Not(Box::new(go(g, map, args, next))),
            FoFormula::Exists(v, g) | FoFormula::Forall(v, g) => {
                let fresh = *next;
                *next += 1;
                map.push((*v, fresh));
                let body = go(g, map, args, next);
                map.pop();
                if matches!(f, FoFormula::Exists(..)) {
                    FoFormula::exists(fresh, body)
                } else {
                    FoFormula::forall(fresh, body)
                }
            }
        }
    }
    go(f, &mut Vec::new(), args, next)
}

struct Constraint<'a> {
    formula: &'a TableFormula,
    /// Instance variable at each argument position.
    args: &'a [Var],
    /// The distinct variables of `args`.
    vars: Vec<Var>,
}

impl Constraint<'_> {
    /// Is there an assignment below `upper` with `target` set to `value`?
    fn supports(
        &self,
        tables: &[AtomTable],
        target: Var,
        value: usize,
        upper: &[usize],
        assign: &mut [Option<usize>],
    ) -> bool {
        let rest: Vec<Var> = self.vars.iter().copied().filter(|&v| v != target).collect();
        assign[target] = Some(value);
        let found = self.extend(tables, &rest, upper, assign);
        assign[target] = None;
        found
    }

    fn extend(&self, tables: &[AtomTable], rest: &[Var], upper: &[usize], assign: &mut [Option<usize>]) -> bool {
        let state = self.formula.partial(tables, &|p: Var| assign[self.args[p]]);
        match (state, rest.split_first()) {
            (Some(b), _) => b,
            (None, None) => unreachable!("a fully assigned formula has a truth value"),
            (None, Some((&v, tail))) => {
                let mut found = false;
                for x in (0..=upper[v]).rev() {
                    assign[v] = Some(x);
                    if self.extend(tables, tail, upper, assign) {
                        found = true;
                        break;
                    }
                }
                assign[v] = None;
                found
            }
        }
    }
}

/// Lowers each variable's upper bound to the largest sample index that has
/// a support below the other bounds, until nothing changes. For max-closed
/// constraints the final bounds form a solution, and every solution lies
/// below them; `None` means there is none.
fn propagate_upper_bounds(
    num_vars: usize,
    n: usize,
    constraints: &[Constraint],
    tables: &[AtomTable],
) -> Option<Vec<usize>> {
    if n == 0 && num_vars > 0 {
        return None;
    }
    let mut upper = vec![n.saturating_sub(1); num_vars];
    let mut watchers: Vec<Vec<usize>> = vec![Vec::new(); num_vars];
    for (c, con) in constraints.iter().enumerate() {
        for &v in &con.vars {
            watchers[v].push(c);
        }
    }
    let mut assign = vec![None; num_vars];
    let mut queue: VecDeque<usize> = (0..constraints.len()).collect();
    let mut queued = vec![true; constraints.len()];
    while let Some(c) = queue.pop_front() {
        queued[c] = false;
        let con = &constraints[c];
        if con.vars.is_empty() {
            if !con.formula.holds(tables, &|_| 0) {
                return None;
            }
            continue;
        }
        let mut changed = Vec::new();
        for &v in &con.vars {
            let best = (0..=upper[v])
                .rev()
                .find(|&x| con.supports(tables, v, x, &upper, &mut assign))?;
            if best < upper[v] {
                upper[v] = best;
                changed.push(v);
            }
        }
        for v in changed {
            for &d in &watchers[v] {
                if !queued[d] {
                    queued[d] = true;
                    queue.push_back(d);
                }
            }
        }
    }
    Some(upper)
}

/// Convenience wrapper: builds a solver for `relations` and solves `instance`.
pub fn solve_csp(instance: &VcspInstance, relations: &RelationSet, limits: &Limits) -> Result<CspOutcome> {
    CspSolver::new(relations, limits)?.solve(instance)
}
