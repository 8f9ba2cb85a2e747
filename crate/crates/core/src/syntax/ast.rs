use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numbers::{LaurentNumber, Rational, SupportWindow};

pub type Var = usize;

/// `c·x` or a constant `k·1` (with `k` possibly infinitesimal).
///
/// Scalings never nest: `2·(3·x)` is stored as `6·x`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    Scaled { coeff: Rational, var: Var },
    Const(LaurentNumber),
}

impl Term {
    pub fn var(var: Var) -> Self {
        Term::Scaled {
            coeff: Rational::one(),
            var,
        }
    }

    pub fn scaled(coeff: Rational, var: Var) -> Self {
        Term::Scaled { coeff, var }
    }

    pub fn constant(value: LaurentNumber) -> Self {
        Term::Const(value)
    }

    pub fn rational(q: Rational) -> Self {
        Term::Const(LaurentNumber::from_rational(q))
    }

    pub fn variable(&self) -> Option<Var> {
        match self {
            Term::Scaled { var, .. } => Some(*var),
            Term::Const(_) => None,
        }
    }

    /// `q·t`, composing scalings.
    pub fn scale(&self, q: &Rational) -> Term {
        match self {
            Term::Scaled { coeff, var } => Term::Scaled {
                coeff: coeff * q,
                var: *var,
            },
            Term::Const(k) => Term::Const(k.scale(q)),
        }
    }

    pub fn evaluate(&self, point: &[LaurentNumber]) -> LaurentNumber {
        match self {
            Term::Scaled { coeff, var } => point[*var].scale(coeff),
            Term::Const(k) => k.clone(),
        }
    }

    /// Zero-coefficient scalings become the constant 0.
    fn simplify(self) -> Term {
        match self {
            Term::Scaled { coeff, .. } if coeff.is_zero() => Term::Const(LaurentNumber::zero()),
            t => t,
        }
    }

    pub(crate) fn rename(&self, map: &dyn Fn(Var) -> Var) -> Term {
        match self {
            Term::Scaled { coeff, var } => Term::Scaled {
                coeff: coeff.clone(),
                var: map(*var),
            },
            t => t.clone(),
        }
    }

    /// Replaces `var` by `replacement` (a variable term or constant).
    pub(crate) fn substitute(&self, var: Var, replacement: &Term) -> Term {
        match self {
            Term::Scaled { coeff, var: v } if *v == var => replacement.scale(coeff),
            t => t.clone(),
        }
    }

    pub(crate) fn constants(&self) -> Option<&LaurentNumber> {
        match self {
            Term::Const(k) => Some(k),
            _ => None,
        }
    }
}

/// Comparison operator. `Leq` is internal only: it arises from the weak
/// closure [`Atom::bar`] and never appears in input files.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Rel {
    Lt,
    Eq,
    Leq,
}

impl Rel {
    pub fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            Rel::Lt => ord == Less,
            Rel::Eq => ord == Equal,
            Rel::Leq => ord != Greater,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Atom {
    True,
    False,
    Cmp { lhs: Term, op: Rel, rhs: Term },
}

impl Atom {
    pub fn lt(lhs: Term, rhs: Term) -> Self {
        Atom::Cmp {
            lhs,
            op: Rel::Lt,
            rhs,
        }
    }

    pub fn eq(lhs: Term, rhs: Term) -> Self {
        Atom::Cmp {
            lhs,
            op: Rel::Eq,
            rhs,
        }
    }

    pub fn leq(lhs: Term, rhs: Term) -> Self {
        Atom::Cmp {
            lhs,
            op: Rel::Leq,
            rhs,
        }
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Atom::True
        } else {
            Atom::False
        }
    }

    /// Canonical form: ground and reflexive comparisons are decided,
    /// zero scalings become the constant 0, and a two-variable atom with two
    /// negative coefficients is multiplied through by −1. Idempotent.
    pub fn normalize(self) -> Atom {
        let (lhs, op, rhs) = match self {
            Atom::Cmp { lhs, op, rhs } => (lhs.simplify(), op, rhs.simplify()),
            other => return other,
        };
        match (&lhs, &rhs) {
            (Term::Const(a), Term::Const(b)) => Atom::from_bool(op.holds(a.cmp(b))),
            (Term::Scaled { coeff: c1, var: v1 }, Term::Scaled { coeff: c2, var: v2 })
                if v1 == v2 =>
            {
                // c1·x op c2·x  ⇔  0 op (c2 − c1)·x
                let diff = c2 - c1;
                if diff.is_zero() {
                    return Atom::from_bool(op != Rel::Lt);
                }
                match op {
                    Rel::Eq => Atom::eq(Term::scaled(-diff, *v1), Term::rational(Rational::zero())),
                    _ => Atom::Cmp {
                        lhs: Term::rational(Rational::zero()),
                        op,
                        rhs: Term::scaled(diff, *v1),
                    },
                }
            }
            (Term::Scaled { coeff: c1, var: v1 }, Term::Scaled { coeff: c2, var: v2 })
                if c1.is_negative() && c2.is_negative() =>
            {
                let l = Term::scaled(-c1, *v1);
                let r = Term::scaled(-c2, *v2);
                match op {
                    Rel::Eq => Atom::eq(l, r),
                    _ => Atom::Cmp { lhs: r, op, rhs: l },
                }
            }
            _ => Atom::Cmp { lhs, op, rhs },
        }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, Atom::True | Atom::False)
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        if let Atom::Cmp { lhs, rhs, .. } = self {
            for t in [lhs, rhs] {
                if let Some(v) = t.variable() {
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
        }
        out
    }

    pub fn mentions(&self, var: Var) -> bool {
        self.vars().contains(&var)
    }

    pub fn evaluate(&self, point: &[LaurentNumber]) -> bool {
        match self {
            Atom::True => true,
            Atom::False => false,
            Atom::Cmp { lhs, op, rhs } => op.holds(lhs.evaluate(point).cmp(&rhs.evaluate(point))),
        }
    }

    /// The weak closure: `s < t` becomes `s ≤ t`, equalities stay.
    pub fn bar(&self) -> Result<Atom> {
        match self {
            Atom::Cmp { lhs, op, rhs } => Ok(Atom::Cmp {
                lhs: lhs.clone(),
                op: if *op == Rel::Lt { Rel::Leq } else { *op },
                rhs: rhs.clone(),
            }),
            _ => Err(Error::Invalid(format!("bar() is undefined on `{self}`"))),
        }
    }

    /// Positive disjunction equivalent to the negation of this atom.
    pub fn negation(&self) -> Vec<Atom> {
        match self {
            Atom::True => vec![Atom::False],
            Atom::False => vec![Atom::True],
            Atom::Cmp { lhs, op, rhs } => {
                let (s, t) = (lhs.clone(), rhs.clone());
                let out = match op {
                    Rel::Eq => vec![Atom::lt(s.clone(), t.clone()), Atom::lt(t, s)],
                    Rel::Lt => vec![Atom::lt(t.clone(), s.clone()), Atom::eq(s, t)],
                    Rel::Leq => vec![Atom::lt(t, s)],
                };
                out.into_iter().map(Atom::normalize).collect()
            }
        }
    }

    pub fn substitute(&self, var: Var, replacement: &Term) -> Atom {
        match self {
            Atom::Cmp { lhs, op, rhs } => Atom::Cmp {
                lhs: lhs.substitute(var, replacement),
                op: *op,
                rhs: rhs.substitute(var, replacement),
            }
            .normalize(),
            a => a.clone(),
        }
    }

    pub fn rename(&self, map: &dyn Fn(Var) -> Var) -> Atom {
        match self {
            Atom::Cmp { lhs, op, rhs } => Atom::Cmp {
                lhs: lhs.rename(map),
                op: *op,
                rhs: rhs.rename(map),
            }
            .normalize(),
            a => a.clone(),
        }
    }

    pub fn constants(&self) -> Vec<&LaurentNumber> {
        match self {
            Atom::Cmp { lhs, rhs, .. } => [lhs, rhs].into_iter().filter_map(Term::constants).collect(),
            _ => Vec::new(),
        }
    }
}

/// Quantifier-free formula.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum QfFormula {
    Atom(Atom),
    And(Vec<QfFormula>),
    Or(Vec<QfFormula>),
    Not(Box<QfFormula>),
}

impl QfFormula {
    pub fn truth(b: bool) -> Self {
        QfFormula::Atom(Atom::from_bool(b))
    }

    pub fn conjunction(atoms: impl IntoIterator<Item = Atom>) -> Self {
        QfFormula::And(atoms.into_iter().map(QfFormula::Atom).collect())
    }

    pub fn evaluate(&self, point: &[LaurentNumber]) -> bool {
        match self {
            QfFormula::Atom(a) => a.evaluate(point),
            QfFormula::And(fs) => fs.iter().all(|f| f.evaluate(point)),
            QfFormula::Or(fs) => fs.iter().any(|f| f.evaluate(point)),
            QfFormula::Not(f) => !f.evaluate(point),
        }
    }

    /// No `Not` nodes.
    pub fn is_positive(&self) -> bool {
        match self {
            QfFormula::Atom(_) => true,
            QfFormula::And(fs) | QfFormula::Or(fs) => fs.iter().all(QfFormula::is_positive),
            QfFormula::Not(_) => false,
        }
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            QfFormula::Atom(a) => out.push(a),
            QfFormula::And(fs) | QfFormula::Or(fs) => fs.iter().for_each(|f| f.collect_atoms(out)),
            QfFormula::Not(f) => f.collect_atoms(out),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        self.atoms().iter().flat_map(|a| a.vars()).collect()
    }

    pub fn rename(&self, map: &dyn Fn(Var) -> Var) -> QfFormula {
        match self {
            QfFormula::Atom(a) => QfFormula::Atom(a.rename(map)),
            QfFormula::And(fs) => QfFormula::And(fs.iter().map(|f| f.rename(map)).collect()),
            QfFormula::Or(fs) => QfFormula::Or(fs.iter().map(|f| f.rename(map)).collect()),
            QfFormula::Not(f) => QfFormula::Not(Box::new(f.rename(map))),
        }
    }

    /// Flattens nested connectives and propagates `true`/`false`.
    pub fn simplify(self) -> QfFormula {
        match self {
            QfFormula::Atom(a) => QfFormula::Atom(a.normalize()),
            QfFormula::Not(f) => match f.simplify() {
                QfFormula::Atom(Atom::True) => QfFormula::truth(false),
                QfFormula::Atom(Atom::False) => QfFormula::truth(true),
                g => QfFormula::Not(Box::new(g)),
            },
            QfFormula::And(fs) => {
                let mut out: Vec<QfFormula> = Vec::new();
                for f in fs.into_iter().map(QfFormula::simplify) {
                    match f {
                        QfFormula::Atom(Atom::True) => {}
                        QfFormula::Atom(Atom::False) => return QfFormula::truth(false),
                        QfFormula::And(inner) => extend_unique(&mut out, inner),
                        g => extend_unique(&mut out, vec![g]),
                    }
                }
                match out.len() {
                    0 => QfFormula::truth(true),
                    1 => out.pop().unwrap(),
                    _ => QfFormula::And(out),
                }
            }
            QfFormula::Or(fs) => {
                let mut out: Vec<QfFormula> = Vec::new();
                for f in fs.into_iter().map(QfFormula::simplify) {
                    match f {
                        QfFormula::Atom(Atom::False) => {}
                        QfFormula::Atom(Atom::True) => return QfFormula::truth(true),
                        QfFormula::Or(inner) => extend_unique(&mut out, inner),
                        g => extend_unique(&mut out, vec![g]),
                    }
                }
                match out.len() {
                    0 => QfFormula::truth(false),
                    1 => out.pop().unwrap(),
                    _ => QfFormula::Or(out),
                }
            }
        }
    }
}

fn extend_unique(out: &mut Vec<QfFormula>, items: Vec<QfFormula>) {
    for f in items {
        if !out.contains(&f) {
            out.push(f);
        }
    }
}

/// First-order formula.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum FoFormula {
    Atom(Atom),
    And(Vec<FoFormula>),
    Or(Vec<FoFormula>),
    Not(Box<FoFormula>),
    Exists(Var, Box<FoFormula>),
    Forall(Var, Box<FoFormula>),
}

impl FoFormula {
    pub fn exists(var: Var, body: FoFormula) -> Self {
        FoFormula::Exists(var, Box::new(body))
    }

    pub fn forall(var: Var, body: FoFormula) -> Self {
        FoFormula::Forall(var, Box::new(body))
    }

    pub fn atom_count(&self) -> usize {
        match self {
            FoFormula::Atom(_) => 1,
            FoFormula::And(fs) | FoFormula::Or(fs) => fs.iter().map(FoFormula::atom_count).sum(),
            FoFormula::Not(f) | FoFormula::Exists(_, f) | FoFormula::Forall(_, f) => f.atom_count(),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            FoFormula::Atom(_) => true,
            FoFormula::And(fs) | FoFormula::Or(fs) => fs.iter().all(FoFormula::is_quantifier_free),
            FoFormula::Not(f) => f.is_quantifier_free(),
            FoFormula::Exists(..) | FoFormula::Forall(..) => false,
        }
    }

    /// Largest variable index mentioned anywhere, bound or free.
    pub fn max_var(&self) -> Option<Var> {
        match self {
            FoFormula::Atom(a) => a.vars().into_iter().max(),
            FoFormula::And(fs) | FoFormula::Or(fs) => fs.iter().filter_map(FoFormula::max_var).max(),
            FoFormula::Not(f) => f.max_var(),
            FoFormula::Exists(v, f) | FoFormula::Forall(v, f) => {
                Some(f.max_var().map_or(*v, |m| m.max(*v)))
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        match self {
            FoFormula::Atom(a) => a.vars().into_iter().collect(),
            FoFormula::And(fs) | FoFormula::Or(fs) => {
                fs.iter().flat_map(FoFormula::free_vars).collect()
            }
            FoFormula::Not(f) => f.free_vars(),
            FoFormula::Exists(v, f) | FoFormula::Forall(v, f) => {
                let mut s = f.free_vars();
                s.remove(v);
                s
            }
        }
    }
}

impl From<QfFormula> for FoFormula {
    fn from(f: QfFormula) -> Self {
        match f {
            QfFormula::Atom(a) => FoFormula::Atom(a),
            QfFormula::And(fs) => FoFormula::And(fs.into_iter().map(Into::into).collect()),
            QfFormula::Or(fs) => FoFormula::Or(fs.into_iter().map(Into::into).collect()),
            QfFormula::Not(f) => FoFormula::Not(Box::new((*f).into())),
        }
    }
}

/// One case of a piecewise cost function: `value` wherever every atom of
/// `guard` holds.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Piece {
    pub value: Term,
    pub guard: Vec<Atom>,
}

/// A partial cost function given by pieces with pairwise disjoint guards;
/// the cost is `+∞` where no guard holds.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PlhCostFunction {
    pub name: String,
    pub arity: usize,
    pub pieces: Vec<Piece>,
}

impl PlhCostFunction {
    pub fn new(name: impl Into<String>, arity: usize, pieces: Vec<Piece>) -> Self {
        PlhCostFunction {
            name: name.into(),
            arity,
            pieces,
        }
    }

    /// Every guard atom, in piece order.
    pub fn guard_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.pieces.iter().flat_map(|p| p.guard.iter())
    }

    /// Variable indices in range and constants inside the `[-1, 1]` window.
    pub fn check_well_formed(&self) -> Result<()> {
        let check_term = |t: &Term| -> Result<()> {
            match t {
                Term::Scaled { var, .. } if *var >= self.arity => Err(Error::ArityMismatch(format!(
                    "`{}` has arity {} but mentions variable {}",
                    self.name, self.arity, var
                ))),
                Term::Const(k) if !k.fits(SupportWindow::CONSTANTS) => {
                    Err(Error::ConstantOutsideWindow(k.to_string()))
                }
                _ => Ok(()),
            }
        };
        for piece in &self.pieces {
            check_term(&piece.value)?;
            for atom in &piece.guard {
                if let Atom::Cmp { lhs, rhs, .. } = atom {
                    check_term(lhs)?;
                    check_term(rhs)?;
                }
            }
        }
        Ok(())
    }

    /// True when every constant in values and guards is rational.
    pub fn has_rational_constants(&self) -> bool {
        self.pieces.iter().all(|p| {
            p.value.constants().is_none_or(LaurentNumber::is_rational)
                && p.guard.iter().all(|a| a.constants().into_iter().all(LaurentNumber::is_rational))
        })
    }

    /// A `{0, +∞}`-valued function (a relation).
    pub fn is_crisp(&self) -> bool {
        self.pieces
            .iter()
            .all(|p| matches!(&p.value, Term::Const(k) if k.is_zero()))
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Language {
    pub functions: Vec<PlhCostFunction>,
}

impl Language {
    pub fn new(functions: Vec<PlhCostFunction>) -> Self {
        Language { functions }
    }

    pub fn get(&self, name: &str) -> Option<&PlhCostFunction> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn require(&self, name: &str) -> Result<&PlhCostFunction> {
        self.get(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn index(&self) -> HashMap<&str, &PlhCostFunction> {
        self.functions.iter().map(|f| (f.name.as_str(), f)).collect()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RelationDef {
    pub name: String,
    pub arity: usize,
    pub formula: FoFormula,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RelationSet {
    pub relations: Vec<RelationDef>,
}

impl RelationSet {
    pub fn get(&self, name: &str) -> Option<&RelationDef> {
        self.relations.iter().find(|r| r.name == name)
    }
}

/// Cost bound of a threshold query.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub enum Threshold {
    #[default]
    Absent,
    Infinite,
    Value(Rational),
}

/// `f(x_{i₁}, …, x_{iₖ})`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Summand {
    pub function: String,
    pub args: Vec<Var>,
}

impl Summand {
    pub fn new(function: impl Into<String>, args: Vec<Var>) -> Self {
        Summand {
            function: function.into(),
            args,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VcspInstance {
    pub num_vars: usize,
    pub summands: Vec<Summand>,
    pub threshold: Threshold,
}

impl VcspInstance {
    pub fn new(num_vars: usize, summands: Vec<Summand>) -> Self {
        VcspInstance {
            num_vars,
            summands,
            threshold: Threshold::Absent,
        }
    }

    pub fn with_threshold(mut self, threshold: Threshold) -> Self {
        self.threshold = threshold;
        self
    }

    /// Every summand names a known function of matching arity and uses
    /// variables below `num_vars`.
    pub fn validate_against(&self, language: &Language) -> Result<()> {
        for s in &self.summands {
            let f = language.require(&s.function)?;
            self.check_summand(s, f.arity)?;
        }
        Ok(())
    }

    pub(crate) fn check_summand(&self, s: &Summand, arity: usize) -> Result<()> {
        if s.args.len() != arity {
            return Err(Error::ArityMismatch(format!(
                "`{}` takes {} arguments, applied to {}",
                s.function,
                arity,
                s.args.len()
            )));
        }
        if let Some(v) = s.args.iter().find(|&&v| v >= self.num_vars) {
            return Err(Error::ArityMismatch(format!(
                "variable {} out of range for an instance with {} variables",
                v, self.num_vars
            )));
        }
        Ok(())
    }

    /// Distinct function names in order of first use.
    pub fn used_functions(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for s in &self.summands {
            if !out.contains(&s.function.as_str()) {
                out.push(&s.function);
            }
        }
        out
    }
}

/// A cost table over a finite set of rationals; missing entries are `+∞`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteCostTable {
    pub name: String,
    pub arity: usize,
    pub entries: BTreeMap<Vec<Rational>, Rational>,
}

/// A finite-domain instance whose summands name either a table or an
/// outside cost function (restricted to the domain on evaluation).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteInstance {
    pub num_vars: usize,
    pub tables: Vec<FiniteCostTable>,
    pub summands: Vec<Summand>,
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Scaled { coeff, var } if coeff.is_one() => write!(f, "(var {var})"),
            Term::Scaled { coeff, var } => write!(f, "(scale {coeff} (var {var}))"),
            Term::Const(k) => write!(f, "(const {k})"),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::True => f.write_str("true"),
            Atom::False => f.write_str("false"),
            Atom::Cmp { lhs, op, rhs } => {
                let name = match op {
                    Rel::Lt => "lt",
                    Rel::Eq => "eq",
                    Rel::Leq => "le",
                };
                write!(f, "({name} {lhs} {rhs})")
            }
        }
    }
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, head: &str, items: &[T]) -> fmt::Result {
    write!(f, "({head}")?;
    for item in items {
        write!(f, " {item}")?;
    }
    f.write_str(")")
}

impl fmt::Display for QfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QfFormula::Atom(a) => write!(f, "{a}"),
            QfFormula::And(fs) => write_list(f, "and", fs),
            QfFormula::Or(fs) => write_list(f, "or", fs),
            QfFormula::Not(g) => write!(f, "(not {g})"),
        }
    }
}

impl fmt::Display for FoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FoFormula::Atom(a) => write!(f, "{a}"),
            FoFormula::And(fs) => write_list(f, "and", fs),
            FoFormula::Or(fs) => write_list(f, "or", fs),
            FoFormula::Not(g) => write!(f, "(not {g})"),
            FoFormula::Exists(v, g) => write!(f, "(exists {v} {g})"),
            FoFormula::Forall(v, g) => write!(f, "(forall {v} {g})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{rat, ratio};

    #[test]
    fn composed_scalings_flatten() {
        let t = Term::var(0).scale(&rat(3)).scale(&rat(2));
        let a = Atom::lt(t, Term::var(1)).normalize();
        assert_eq!(a, Atom::lt(Term::scaled(rat(6), 0), Term::var(1)));
    }

    #[test]
    fn reflexive_strict_atom_is_false() {
        assert_eq!(Atom::lt(Term::var(0), Term::var(0)).normalize(), Atom::False);
        assert_eq!(Atom::eq(Term::var(0), Term::var(0)).normalize(), Atom::True);
    }

    #[test]
    fn both_negative_coefficients_flip() {
        let a = Atom::eq(Term::scaled(rat(-2), 0), Term::scaled(rat(-3), 1)).normalize();
        assert_eq!(a, Atom::eq(Term::scaled(rat(2), 0), Term::scaled(rat(3), 1)));
        let b = Atom::lt(Term::scaled(rat(-2), 0), Term::scaled(rat(-3), 1)).normalize();
        assert_eq!(b, Atom::lt(Term::scaled(rat(3), 1), Term::scaled(rat(2), 0)));
    }

    #[test]
    fn same_variable_becomes_single_variable_atom() {
        let a = Atom::lt(Term::var(0), Term::scaled(rat(2), 0)).normalize();
        assert_eq!(a, Atom::lt(Term::rational(rat(0)), Term::var(0)));
    }

    #[test]
    fn ground_atoms_are_decided() {
        let a = Atom::lt(Term::rational(rat(1)), Term::constant(LaurentNumber::epsilon()));
        assert_eq!(a.normalize(), Atom::False);
        let b = Atom::lt(Term::scaled(rat(0), 3), Term::rational(ratio(1, 2)));
        assert_eq!(b.normalize(), Atom::True);
    }

    #[test]
    fn bar_weakens_strict_atoms_only() {
        let lt = Atom::lt(Term::var(0), Term::scaled(rat(2), 1));
        assert_eq!(lt.bar().unwrap(), Atom::leq(Term::var(0), Term::scaled(rat(2), 1)));
        let eq = Atom::eq(Term::var(0), Term::rational(rat(3)));
        assert_eq!(eq.bar().unwrap(), eq);
        assert_eq!(eq.bar().unwrap().bar().unwrap(), eq);
        assert!(Atom::True.bar().is_err());
    }

    #[test]
    fn simplify_propagates_constants() {
        let f = QfFormula::And(vec![
            QfFormula::truth(true),
            QfFormula::Or(vec![QfFormula::truth(false), QfFormula::truth(true)]),
        ]);
        assert_eq!(f.simplify(), QfFormula::truth(true));
    }
}
