use std::collections::{BTreeMap, BTreeSet};

use super::ast::{
    Atom, FiniteCostTable, FiniteInstance, FoFormula, Language, Piece, PlhCostFunction,
    RelationDef, RelationSet, Summand, Term, Threshold, Var, VcspInstance,
};
use super::sexpr::{read_all, SExpr};
use crate::error::{Error, Result};
use crate::numbers::{parse_rational, LaurentNumber, Rational, SupportWindow};

/// What a source file is expected to contain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceKind {
    Language,
    Relations,
    Instance,
    Base,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Parsed {
    Language(Language),
    Relations(RelationSet),
    Instance(VcspInstance),
    Base(FiniteInstance),
}

pub fn parse(text: &str, kind: SourceKind) -> Result<Parsed> {
    Ok(match kind {
        SourceKind::Language => Parsed::Language(parse_language(text)?),
        SourceKind::Relations => Parsed::Relations(parse_relations(text)?),
        SourceKind::Instance => Parsed::Instance(parse_instance(text)?),
        SourceKind::Base => Parsed::Base(parse_finite_instance(text)?),
    })
}

fn single(text: &str, head: &str) -> Result<SExpr> {
    let mut exprs = read_all(text)?;
    match exprs.len() {
        0 => Err(Error::syntax(1, 1, format!("expected `({head} ...)`, found nothing"))),
        1 => {
            let e = exprs.pop().unwrap();
            if e.head() == Some(head) {
                Ok(e)
            } else {
                Err(e.error(format!("expected `({head} ...)`")))
            }
        }
        _ => Err(exprs[1].error("unexpected second top-level expression")),
    }
}

/// `(lang (def name arity (piece term (and atom*))+)*)`. Every function is
/// checked for range, window and pairwise disjointness of its guards.
pub fn parse_language(text: &str) -> Result<Language> {
    let top = single(text, "lang")?;
    let mut functions: Vec<PlhCostFunction> = Vec::new();
    for def in top.tagged("lang").unwrap() {
        let f = parse_def(def)?;
        if functions.iter().any(|g| g.name == f.name) {
            return Err(def.error(format!("function `{}` defined twice", f.name)));
        }
        functions.push(f);
    }
    Ok(Language::new(functions))
}

fn parse_def(e: &SExpr) -> Result<PlhCostFunction> {
    let items = e.tagged("def").ok_or_else(|| e.error("expected `(def name arity piece+)`"))?;
    if items.len() < 3 {
        return Err(e.error("a definition needs a name, an arity and at least one piece"));
    }
    let name = symbol(&items[0])?;
    let arity = index(&items[1])?;
    let pieces = items[2..].iter().map(parse_piece).collect::<Result<Vec<_>>>()?;
    let f = PlhCostFunction::new(name, arity, pieces);
    f.check_well_formed()?;
    crate::fm::check_guards_disjoint(&f)?;
    Ok(f)
}

fn parse_piece(e: &SExpr) -> Result<Piece> {
    let items = e.tagged("piece").ok_or_else(|| e.error("expected `(piece term (and atom*))`"))?;
    if items.len() != 2 {
        return Err(e.error("a piece has exactly a value term and a guard"));
    }
    let value = parse_term(&items[0])?;
    let conj = items[1]
        .tagged("and")
        .ok_or_else(|| items[1].error("a guard is a conjunction `(and atom*)`"))?;
    let mut guard = Vec::new();
    for a in conj {
        match parse_atom(a)? {
            Atom::True => {}
            atom => {
                if !guard.contains(&atom) {
                    guard.push(atom)
                }
            }
        }
    }
    if guard.contains(&Atom::False) {
        guard = vec![Atom::False];
    }
    Ok(Piece { value, guard })
}

fn symbol(e: &SExpr) -> Result<String> {
    match e.as_atom() {
        Some(s) if s.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_') => {
            Ok(s.to_string())
        }
        _ => Err(e.error("expected a name")),
    }
}

fn index(e: &SExpr) -> Result<usize> {
    e.as_atom()
        .filter(|s| s.bytes().all(|b| b.is_ascii_digit()))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| e.error("expected a non-negative integer"))
}

fn rational(e: &SExpr) -> Result<Rational> {
    e.as_atom()
        .and_then(parse_rational)
        .ok_or_else(|| e.error("expected a rational such as `3`, `-2` or `1/2`"))
}

fn exponent(e: &SExpr) -> Result<i32> {
    e.as_atom()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| e.error("expected an integer exponent"))
}

fn parse_eps(e: &SExpr) -> Result<(i32, Rational)> {
    match e.tagged("eps") {
        Some([k, c]) => Ok((exponent(k)?, rational(c)?)),
        _ => Err(e.error("expected `(eps exponent coefficient)`")),
    }
}

fn laurent(e: &SExpr) -> Result<LaurentNumber> {
    if e.as_atom().is_some() {
        return Ok(LaurentNumber::from_rational(rational(e)?));
    }
    if e.head() == Some("eps") {
        let (k, c) = parse_eps(e)?;
        return Ok(LaurentNumber::monomial(c, k));
    }
    let items = e.tagged("+").ok_or_else(|| e.error("expected a rational, `(eps k c)` or `(+ ...)`"))?;
    let mut terms = Vec::new();
    for item in items {
        if item.as_atom().is_some() {
            terms.push((0, rational(item)?));
        } else {
            terms.push(parse_eps(item)?);
        }
    }
    Ok(LaurentNumber::from_terms(terms))
}

/// Reads one Laurent number in its textual form, with no window check.
pub fn parse_laurent(text: &str) -> Result<LaurentNumber> {
    let mut exprs = read_all(text)?;
    if exprs.len() != 1 {
        return Err(Error::syntax(1, 1, "expected exactly one number"));
    }
    laurent(&exprs.pop().unwrap())
}

fn parse_term(e: &SExpr) -> Result<Term> {
    match e.head() {
        Some("var") => match e.tagged("var") {
            Some([i]) => Ok(Term::var(index(i)?)),
            _ => Err(e.error("expected `(var index)`")),
        },
        Some("scale") => match e.tagged("scale") {
            Some([q, inner]) => {
                let q = rational(q)?;
                Ok(parse_term(inner)?.scale(&q))
            }
            _ => Err(e.error("expected `(scale rational term)`")),
        },
        Some("const") => match e.tagged("const") {
            Some([k]) => {
                let value = laurent(k)?;
                if !value.fits(SupportWindow::CONSTANTS) {
                    return Err(Error::ConstantOutsideWindow(value.to_string()));
                }
                Ok(Term::Const(value))
            }
            _ => Err(e.error("expected `(const number)`")),
        },
        _ => Err(e.error("expected a term: `(var i)`, `(scale q term)` or `(const k)`")),
    }
}

fn parse_atom(e: &SExpr) -> Result<Atom> {
    match e.as_atom() {
        Some("true") => return Ok(Atom::True),
        Some("false") => return Ok(Atom::False),
        _ => {}
    }
    let (items, lt) = if let Some(items) = e.tagged("lt") {
        (items, true)
    } else if let Some(items) = e.tagged("eq") {
        (items, false)
    } else {
        return Err(e.error("expected an atom: `(lt t t)`, `(eq t t)`, `true` or `false`"));
    };
    let [l, r] = items else {
        return Err(e.error("a comparison takes exactly two terms"));
    };
    let (l, r) = (parse_term(l)?, parse_term(r)?);
    let atom = if lt { Atom::lt(l, r) } else { Atom::eq(l, r) };
    Ok(atom.normalize())
}

fn is_atom_form(e: &SExpr) -> bool {
    matches!(e.as_atom(), Some("true" | "false")) || matches!(e.head(), Some("lt" | "eq"))
}

/// Quantified variables are renamed apart from free ones (and from each
/// other) only where they would otherwise clash.
struct Renamer {
    free: BTreeSet<Var>,
    used: BTreeSet<Var>,
    next: Var,
}

impl Renamer {
    fn fresh(&mut self) -> Var {
        while self.used.contains(&self.next) {
            self.next += 1;
        }
        self.used.insert(self.next);
        self.next
    }
}

fn surface_free_vars(e: &SExpr, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) -> Result<()> {
    if is_atom_form(e) {
        for v in parse_atom(e)?.vars() {
            if !bound.contains(&v) {
                out.insert(v);
            }
        }
        return Ok(());
    }
    match (e.head(), e) {
        (Some("exists" | "forall"), SExpr::List(items, _)) if items.len() == 3 => {
            bound.push(index(&items[1])?);
            surface_free_vars(&items[2], bound, out)?;
            bound.pop();
            Ok(())
        }
        (Some("and" | "or" | "not"), SExpr::List(items, _)) => {
            items[1..].iter().try_for_each(|f| surface_free_vars(f, bound, out))
        }
        _ => Err(e.error("expected a formula")),
    }
}

fn surface_indices(e: &SExpr, out: &mut BTreeSet<Var>) {
    if let SExpr::List(items, _) = e {
        match e.head() {
            Some("var") | Some("exists") | Some("forall") => {
                if let Some(Ok(i)) = items.get(1).map(index) {
                    out.insert(i);
                }
            }
            _ => {}
        }
        items.iter().for_each(|i| surface_indices(i, out));
    }
}

fn fo(e: &SExpr, scope: &mut Vec<(Var, Var)>, ren: &mut Renamer) -> Result<FoFormula> {
    if is_atom_form(e) {
        let atom = parse_atom(e)?;
        let map = |v: Var| {
            scope
                .iter()
                .rev()
                .find(|(s, _)| *s == v)
                .map_or(v, |(_, t)| *t)
        };
        return Ok(FoFormula::Atom(atom.rename(&map)));
    }
    let SExpr::List(items, _) = e else {
        return Err(e.error("expected a formula"));
    };
    match e.head() {
        Some("and") => Ok(FoFormula::And(
            items[1..].iter().map(|f| fo(f, scope, ren)).collect::<Result<_>>()?,
        )),
        Some("or") => Ok(FoFormula::Or(
            items[1..].iter().map(|f| fo(f, scope, ren)).collect::<Result<_>>()?,
        )),
        Some("not") => match &items[1..] {
            [f] => Ok(FoFormula::Not(Box::new(fo(f, scope, ren)?))),
            _ => Err(e.error("`not` takes one formula")),
        },
        Some(q @ ("exists" | "forall")) => {
            let [_, v, body] = &items[..] else {
                return Err(e.error(format!("expected `({q} index formula)`")));
            };
            let surface = index(v)?;
            let clash = ren.free.contains(&surface)
                || scope.iter().any(|(s, _)| *s == surface)
                || !ren.used.insert(surface);
            let internal = if clash { ren.fresh() } else { surface };
            scope.push((surface, internal));
            let body = fo(body, scope, ren)?;
            scope.pop();
            Ok(if q == "exists" {
                FoFormula::exists(internal, body)
            } else {
                FoFormula::forall(internal, body)
            })
        }
        _ => Err(e.error("expected a formula: atom, and, or, not, exists or forall")),
    }
}

fn formula_with_free_bound(e: &SExpr, free_below: Option<usize>) -> Result<FoFormula> {
    let mut free = BTreeSet::new();
    surface_free_vars(e, &mut Vec::new(), &mut free)?;
    if let (Some(n), Some(&v)) = (free_below, free.iter().next_back()) {
        if v >= n {
            return Err(Error::ArityMismatch(format!(
                "free variable {v} in a relation of arity {n}"
            )));
        }
    }
    if let Some(n) = free_below {
        free.extend(0..n);
    }
    let mut all = BTreeSet::new();
    surface_indices(e, &mut all);
    let next = all.iter().next_back().map_or(0, |m| m + 1).max(free_below.unwrap_or(0));
    let mut ren = Renamer {
        used: free.clone(),
        free,
        next,
    };
    fo(e, &mut Vec::new(), &mut ren)
}

/// Reads a single first-order formula.
pub fn parse_fo_formula(text: &str) -> Result<FoFormula> {
    let mut exprs = read_all(text)?;
    if exprs.len() != 1 {
        return Err(Error::syntax(1, 1, "expected exactly one formula"));
    }
    formula_with_free_bound(&exprs.pop().unwrap(), None)
}

/// `(rels (rel name arity formula)*)`.
pub fn parse_relations(text: &str) -> Result<RelationSet> {
    let top = single(text, "rels")?;
    let mut relations: Vec<RelationDef> = Vec::new();
    for item in top.tagged("rels").unwrap() {
        let Some([name, arity, body]) = item.tagged("rel") else {
            return Err(item.error("expected `(rel name arity formula)`"));
        };
        let name = symbol(name)?;
        if relations.iter().any(|r| r.name == name) {
            return Err(item.error(format!("relation `{name}` defined twice")));
        }
        let arity = index(arity)?;
        let formula = formula_with_free_bound(body, Some(arity))?;
        relations.push(RelationDef {
            name,
            arity,
            formula,
        });
    }
    Ok(RelationSet { relations })
}

fn parse_vars(e: &SExpr) -> Result<usize> {
    match e.tagged("vars") {
        Some([n]) => index(n),
        _ => Err(e.error("expected `(vars n)`")),
    }
}

fn parse_sum(e: &SExpr, num_vars: usize) -> Result<Vec<Summand>> {
    let items = e.tagged("sum").ok_or_else(|| e.error("expected `(sum (app name idx+)*)`"))?;
    let mut out = Vec::new();
    for app in items {
        let args = app.tagged("app").ok_or_else(|| app.error("expected `(app name idx+)`"))?;
        if args.len() < 2 {
            return Err(app.error("an application needs a name and at least one variable"));
        }
        let name = symbol(&args[0])?;
        let vars = args[1..].iter().map(index).collect::<Result<Vec<_>>>()?;
        if let Some(v) = vars.iter().find(|&&v| v >= num_vars) {
            return Err(app.error(format!(
                "variable {v} out of range for an instance with {num_vars} variables"
            )));
        }
        out.push(Summand::new(name, vars));
    }
    Ok(out)
}

/// `(inst (vars n) (sum (app name idx+)*) (threshold q|inf|none))`; the
/// threshold clause may be omitted.
pub fn parse_instance(text: &str) -> Result<VcspInstance> {
    let top = single(text, "inst")?;
    let items = top.tagged("inst").unwrap();
    if !(2..=3).contains(&items.len()) {
        return Err(top.error("expected `(inst (vars n) (sum ...) [(threshold ...)])`"));
    }
    let num_vars = parse_vars(&items[0])?;
    let summands = parse_sum(&items[1], num_vars)?;
    let threshold = match items.get(2) {
        None => Threshold::Absent,
        Some(t) => match t.tagged("threshold") {
            Some([v]) => match v.as_atom() {
                Some("inf") => Threshold::Infinite,
                Some("none") => Threshold::Absent,
                _ => Threshold::Value(rational(v)?),
            },
            _ => return Err(t.error("expected `(threshold rational|inf|none)`")),
        },
    };
    Ok(VcspInstance {
        num_vars,
        summands,
        threshold,
    })
}

/// `(base (vars n) (table name arity (entry (v*) cost|inf)*)* (sum ...))`.
pub fn parse_finite_instance(text: &str) -> Result<FiniteInstance> {
    let top = single(text, "base")?;
    let items = top.tagged("base").unwrap();
    if items.len() < 2 {
        return Err(top.error("expected `(base (vars n) (table ...)* (sum ...))`"));
    }
    let num_vars = parse_vars(&items[0])?;
    let summands = parse_sum(items.last().unwrap(), num_vars)?;
    let mut tables: Vec<FiniteCostTable> = Vec::new();
    for t in &items[1..items.len() - 1] {
        let parts = t.tagged("table").ok_or_else(|| t.error("expected `(table name arity entry*)`"))?;
        if parts.len() < 2 {
            return Err(t.error("a table needs a name and an arity"));
        }
        let name = symbol(&parts[0])?;
        if tables.iter().any(|x| x.name == name) {
            return Err(t.error(format!("table `{name}` defined twice")));
        }
        let arity = index(&parts[1])?;
        let mut entries = BTreeMap::new();
        for entry in &parts[2..] {
            let Some([point, cost]) = entry.tagged("entry") else {
                return Err(entry.error("expected `(entry (values) cost)`"));
            };
            let SExpr::List(coords, _) = point else {
                return Err(point.error("expected a parenthesized tuple of rationals"));
            };
            if coords.len() != arity {
                return Err(Error::ArityMismatch(format!(
                    "table `{name}` has arity {arity} but an entry has {} coordinates",
                    coords.len()
                )));
            }
            let key = coords.iter().map(rational).collect::<Result<Vec<_>>>()?;
            if cost.as_atom() == Some("inf") {
                entries.remove(&key);
            } else {
                entries.insert(key, rational(cost)?);
            }
        }
        tables.push(FiniteCostTable {
            name,
            arity,
            entries,
        });
    }
    Ok(FiniteInstance {
        num_vars,
        tables,
        summands,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{rat, ratio};

    #[test]
    fn unary_negation_function() {
        let lang = parse_language("(lang (def g1 1 (piece (scale -1 (var 0)) (and true))))").unwrap();
        let g = lang.get("g1").unwrap();
        assert_eq!(g.arity, 1);
        assert_eq!(g.pieces.len(), 1);
        assert_eq!(g.pieces[0].value, Term::scaled(rat(-1), 0));
        assert!(g.pieces[0].guard.is_empty());
    }

    #[test]
    fn constants_outside_the_window_are_rejected() {
        let err = parse_language("(lang (def bad 1 (piece (const (eps -2 1)) (and true))))");
        assert!(matches!(err, Err(Error::ConstantOutsideWindow(_))));
    }

    #[test]
    fn out_of_range_variable_is_an_arity_error() {
        let err = parse_language("(lang (def h 1 (piece (var 1) (and true))))");
        assert!(matches!(err, Err(Error::ArityMismatch(_))));
    }

    #[test]
    fn laurent_literals() {
        let x = parse_laurent("(+ (eps -1 2) 3 (eps 3 1/2))").unwrap();
        assert_eq!(
            x,
            LaurentNumber::from_terms([(-1, rat(2)), (0, rat(3)), (3, ratio(1, 2))])
        );
        assert_eq!(parse_laurent("-1/2").unwrap(), LaurentNumber::from_rational(ratio(-1, 2)));
        assert!(parse_laurent("(eps 1)").is_err());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_language("(lang\n  (def f 1 (piece (var 0) (and (lt (var 0))))))") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 32)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn clashing_bound_variables_are_renamed() {
        let rels = parse_relations(
            "(rels (rel r 1 (and (lt (var 0) (const 1)) (exists 0 (lt (var 0) (const 0))))))",
        )
        .unwrap();
        let FoFormula::And(parts) = &rels.relations[0].formula else { panic!() };
        let FoFormula::Exists(v, _) = &parts[1] else { panic!() };
        assert_eq!(*v, 1);
        assert!(parse_relations("(rels (rel r 1 (lt (var 0) (var 1))))").is_err());
    }

    #[test]
    fn instances_and_thresholds() {
        let inst = parse_instance("(inst (vars 2) (sum (app f 0 1)) (threshold -3/2))").unwrap();
        assert_eq!(inst.threshold, Threshold::Value(ratio(-3, 2)));
        let inst = parse_instance("(inst (vars 1) (sum))").unwrap();
        assert_eq!(inst.threshold, Threshold::Absent);
        assert!(parse_instance("(inst (vars 1) (sum (app f 1)))").is_err());
    }
}
