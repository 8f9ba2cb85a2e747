//! Quantifier elimination for formulas over `<`, `=`, rational scalings and
//! constants, and evaluation of formulas and cost functions at Laurent points.

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::numbers::LaurentNumber;
use crate::syntax::{Atom, FoFormula, Language, PlhCostFunction, QfFormula, Rel, Term, Var, VcspInstance};

/// `x op bound` (upper) or `bound op x` (lower) extracted from an atom.
enum Bound {
    Lower(Term, Rel),
    Upper(Term, Rel),
}

/// Solves an atom mentioning `var` exactly once for `var`.
fn bound_on(atom: &Atom, var: Var) -> Bound {
    let Atom::Cmp { lhs, op, rhs } = atom else {
        unreachable!("trivial atoms do not mention variables")
    };
    let (coeff, other, var_on_left) = match (lhs, rhs) {
        (Term::Scaled { coeff, var: v }, t) if *v == var => (coeff, t, true),
        (t, Term::Scaled { coeff, var: v }) if *v == var => (coeff, t, false),
        _ => unreachable!("atom does not mention the variable"),
    };
    let t = other.scale(&coeff.recip());
    // Dividing by a negative coefficient flips the direction.
    if var_on_left == coeff.is_positive() {
        Bound::Upper(t, *op)
    } else {
        Bound::Lower(t, *op)
    }
}

/// `∃var ⋀clause` as an equivalent quantifier-free conjunction, valid in
/// every ordered Q-vector space extending Q.
pub fn eliminate_exists_clause(clause: &[Atom], var: Var) -> QfFormula {
    let clause: Vec<Atom> = clause.iter().cloned().map(Atom::normalize).collect();
    if clause.contains(&Atom::False) {
        return QfFormula::truth(false);
    }
    let (with, without): (Vec<Atom>, Vec<Atom>) =
        clause.into_iter().filter(|a| *a != Atom::True).partition(|a| a.mentions(var));
    if with.is_empty() {
        return QfFormula::conjunction(without).simplify();
    }

    if let Some(pos) = with.iter().position(|a| matches!(a, Atom::Cmp { op: Rel::Eq, .. })) {
        let replacement = match bound_on(&with[pos], var) {
            Bound::Lower(t, _) | Bound::Upper(t, _) => t,
        };
        let substituted = with
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != pos)
            .map(|(_, a)| a.substitute(var, &replacement));
        return QfFormula::conjunction(without.into_iter().chain(substituted)).simplify();
    }

    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for a in &with {
        match bound_on(a, var) {
            Bound::Lower(t, op) => lower.push((t, op)),
            Bound::Upper(t, op) => upper.push((t, op)),
        }
    }
    let mut out = without;
    for (l, lop) in &lower {
        for (u, uop) in &upper {
            let op = if *lop == Rel::Lt || *uop == Rel::Lt {
                Rel::Lt
            } else {
                Rel::Leq
            };
            out.push(
                Atom::Cmp {
                    lhs: l.clone(),
                    op,
                    rhs: u.clone(),
                }
                .normalize(),
            );
        }
    }
    QfFormula::conjunction(out).simplify()
}

/// Pushes negations down to atoms, replacing each negated atom by the
/// equivalent positive disjunction.
fn negate(f: &QfFormula) -> QfFormula {
    match f {
        QfFormula::Atom(a) => QfFormula::Or(a.negation().into_iter().map(QfFormula::Atom).collect()),
        QfFormula::And(fs) => QfFormula::Or(fs.iter().map(negate).collect()),
        QfFormula::Or(fs) => QfFormula::And(fs.iter().map(negate).collect()),
        QfFormula::Not(g) => positive(g),
    }
}

fn positive(f: &QfFormula) -> QfFormula {
    match f {
        QfFormula::Atom(a) => QfFormula::Atom(a.clone().normalize()),
        QfFormula::And(fs) => QfFormula::And(fs.iter().map(positive).collect()),
        QfFormula::Or(fs) => QfFormula::Or(fs.iter().map(positive).collect()),
        QfFormula::Not(g) => negate(g),
    }
}

/// Disjunctive normal form of a negation-free formula; `false` clauses are
/// dropped and `true` atoms omitted.
pub fn to_dnf(f: &QfFormula, max_clauses: usize) -> Result<Vec<Vec<Atom>>> {
    let clauses = match f {
        QfFormula::Atom(Atom::True) => vec![vec![]],
        QfFormula::Atom(Atom::False) => vec![],
        QfFormula::Atom(a) => vec![vec![a.clone()]],
        QfFormula::Or(fs) => {
            let mut out = Vec::new();
            for g in fs {
                out.extend(to_dnf(g, max_clauses)?);
                if out.len() > max_clauses {
                    return Err(dnf_limit(max_clauses));
                }
            }
            out
        }
        QfFormula::And(fs) => {
            let mut acc: Vec<Vec<Atom>> = vec![vec![]];
            for g in fs {
                let part = to_dnf(g, max_clauses)?;
                if acc.len().saturating_mul(part.len()) > max_clauses {
                    return Err(dnf_limit(max_clauses));
                }
                let mut next = Vec::with_capacity(acc.len() * part.len());
                for a in &acc {
                    for b in &part {
                        let mut clause = a.clone();
                        for atom in b {
                            if !clause.contains(atom) {
                                clause.push(atom.clone());
                            }
                        }
                        next.push(clause);
                    }
                }
                acc = next;
            }
            acc
        }
        QfFormula::Not(_) => return to_dnf(&positive(f), max_clauses),
    };
    Ok(clauses)
}

fn dnf_limit(max: usize) -> Error {
    Error::ResourceLimit(format!("disjunctive normal form exceeds {max} clauses"))
}

fn from_dnf(clauses: Vec<QfFormula>) -> QfFormula {
    QfFormula::Or(clauses).simplify()
}

/// An equivalent quantifier-free, negation-free formula. Quantifiers are
/// removed innermost first; `∀x φ` is read as `¬∃x ¬φ`.
pub fn eliminate_quantifiers(f: &FoFormula, limits: &Limits) -> Result<QfFormula> {
    if f.atom_count() > limits.max_qe_atoms {
        return Err(Error::ResourceLimit(format!(
            "quantifier elimination accepts at most {} atoms, the formula has {}",
            limits.max_qe_atoms,
            f.atom_count()
        )));
    }
    Ok(eliminate(f, limits)?.simplify())
}

fn eliminate(f: &FoFormula, limits: &Limits) -> Result<QfFormula> {
    Ok(match f {
        FoFormula::Atom(a) => QfFormula::Atom(a.clone().normalize()),
        FoFormula::And(fs) => QfFormula::And(fs.iter().map(|g| eliminate(g, limits)).collect::<Result<_>>()?),
        FoFormula::Or(fs) => QfFormula::Or(fs.iter().map(|g| eliminate(g, limits)).collect::<Result<_>>()?),
        FoFormula::Not(g) => negate(&eliminate(g, limits)?),
        FoFormula::Exists(x, body) => exists(&eliminate(body, limits)?, *x, limits)?,
        FoFormula::Forall(x, body) => {
            let inner = negate(&eliminate(body, limits)?);
            negate(&exists(&inner, *x, limits)?)
        }
    }
    .simplify())
}

fn exists(body: &QfFormula, x: Var, limits: &Limits) -> Result<QfFormula> {
    let clauses = to_dnf(&positive(body).simplify(), limits.max_dnf_clauses)?;
    Ok(from_dnf(
        clauses.iter().map(|c| eliminate_exists_clause(c, x)).collect(),
    ))
}

/// Truth value of a sentence (no free variables).
pub fn decide_sentence(f: &FoFormula, limits: &Limits) -> Result<bool> {
    let free = f.free_vars();
    if !free.is_empty() {
        return Err(Error::Invalid(format!(
            "expected a sentence, found free variables {free:?}"
        )));
    }
    let qf = eliminate_quantifiers(f, limits)?;
    Ok(qf.evaluate(&[]))
}

pub fn evaluate_qf(f: &QfFormula, point: &[LaurentNumber]) -> bool {
    f.evaluate(point)
}

/// Cost of `f` at `point`: the value of the unique piece whose guard holds,
/// or `None` (`+∞`) when no guard holds.
pub fn evaluate_cost(f: &PlhCostFunction, point: &[LaurentNumber]) -> Result<Option<LaurentNumber>> {
    if point.len() != f.arity {
        return Err(Error::ArityMismatch(format!(
            "`{}` has arity {}, evaluated at a point of length {}",
            f.name,
            f.arity,
            point.len()
        )));
    }
    let mut found = None;
    for piece in &f.pieces {
        if piece.guard.iter().all(|a| a.evaluate(point)) {
            if found.is_some() {
                return Err(Error::MultipleGuards(f.name.clone()));
            }
            found = Some(piece.value.evaluate(point));
        }
    }
    Ok(found)
}

/// Objective value of an assignment; `+∞` absorbs.
pub fn evaluate_instance(
    instance: &VcspInstance,
    language: &Language,
    point: &[LaurentNumber],
) -> Result<Option<LaurentNumber>> {
    let mut total = LaurentNumber::zero();
    for s in &instance.summands {
        let f = language.require(&s.function)?;
        let args: Vec<LaurentNumber> = s.args.iter().map(|v| point[*v].clone()).collect();
        match evaluate_cost(f, &args)? {
            Some(v) => total += &v,
            None => return Ok(None),
        }
    }
    Ok(Some(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{rat, ratio};
    use crate::syntax::parse_fo_formula;

    fn qe(text: &str) -> QfFormula {
        eliminate_quantifiers(&parse_fo_formula(text).unwrap(), &Limits::default()).unwrap()
    }

    #[test]
    fn equality_substitution() {
        // ∃x ((1/2)x = y ∧ x < 3)  ⇔  2y < 3
        let clause = vec![
            Atom::eq(Term::scaled(ratio(1, 2), 0), Term::var(1)).normalize(),
            Atom::lt(Term::var(0), Term::rational(rat(3))).normalize(),
        ];
        let out = eliminate_exists_clause(&clause, 0);
        assert_eq!(
            out,
            QfFormula::Atom(Atom::lt(Term::scaled(rat(2), 1), Term::rational(rat(3))))
        );
    }

    #[test]
    fn bound_pairing() {
        let clause = vec![Atom::lt(Term::var(1), Term::var(0)), Atom::lt(Term::var(0), Term::var(2))];
        assert_eq!(
            eliminate_exists_clause(&clause, 0),
            QfFormula::Atom(Atom::lt(Term::var(1), Term::var(2)))
        );
        assert_eq!(eliminate_exists_clause(&[Atom::False], 0), QfFormula::truth(false));
    }

    #[test]
    fn closed_sentences() {
        assert_eq!(qe("(forall 0 (exists 1 (lt (var 0) (var 1))))"), QfFormula::truth(true));
        assert_eq!(qe("(exists 0 (lt (var 0) (var 0)))"), QfFormula::truth(false));
    }

    #[test]
    fn double_substitution() {
        // ∃x (2x = y ∧ x = z)  ⇔  y = 2z
        let out = qe("(exists 0 (and (eq (scale 2 (var 0)) (var 1)) (eq (var 0) (var 2))))");
        let expected = Atom::eq(Term::var(1), Term::scaled(rat(2), 2)).normalize();
        let QfFormula::Atom(a) = &out else { panic!("{out}") };
        for (y, z) in [(2, 1), (4, 2), (3, 1), (0, 0)] {
            let point = [
                LaurentNumber::zero(),
                LaurentNumber::from_int(y),
                LaurentNumber::from_int(z),
            ];
            assert_eq!(a.evaluate(&point), expected.evaluate(&point));
        }
    }

    #[test]
    fn output_is_negation_free() {
        let out = qe("(not (exists 0 (and (lt (var 1) (var 0)) (not (eq (var 0) (var 2))))))");
        assert!(out.is_positive());
    }

    #[test]
    fn example_cost_function_values() {
        let lang = crate::syntax::parse_language(
            "(lang (def f 2
               (piece (scale 3 (var 0)) (and (lt (const 0) (var 1)) (lt (var 1) (scale 2 (var 0)))))
               (piece (scale 3 (var 0)) (and (eq (const 0) (var 1)) (lt (const 0) (var 0))))
               (piece (scale 3/2 (var 1)) (and (lt (const 0) (var 0)) (lt (scale 2 (var 0)) (var 1))))
               (piece (scale 3/2 (var 1)) (and (lt (const 0) (var 0)) (eq (scale 2 (var 0)) (var 1))))
               (piece (scale 3/2 (var 1)) (and (eq (const 0) (var 0)) (lt (const 0) (var 1))))
               (piece (scale 3/2 (var 1)) (and (eq (const 0) (var 0)) (eq (const 0) (var 1))))))",
        )
        .unwrap();
        let f = lang.get("f").unwrap();
        let at = |x: i64, y: i64| evaluate_cost(f, &[LaurentNumber::from_int(x), LaurentNumber::from_int(y)]).unwrap();
        assert_eq!(at(1, 1), Some(LaurentNumber::from_int(3)));
        assert_eq!(at(1, 3), Some(LaurentNumber::from_rational(ratio(9, 2))));
        assert_eq!(at(-1, 0), None);
    }
}
