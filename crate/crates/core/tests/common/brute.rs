//! Exhaustive reference computations used as test oracles.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use plh_core::numbers::{LaurentNumber, Rational};
use plh_core::qe::evaluate_instance;
use plh_core::syntax::{Atom, FiniteInstance, Language, PlhCostFunction, Term, VcspInstance};

/// Depth-first search over `elements^nvars` for a point satisfying every
/// atom and, when given, `Σ alpha_i·x_i ≤ u`. Atoms are checked as soon as
/// their variables are assigned; the search is complete.
pub fn search_point(
    atoms: &[Atom],
    objective: Option<(&[Rational], &LaurentNumber)>,
    elements: &[LaurentNumber],
    nvars: usize,
) -> Option<Vec<LaurentNumber>> {
    let ready: Vec<Vec<&Atom>> = (0..nvars)
        .map(|level| {
            atoms
                .iter()
                .filter(|a| a.vars().into_iter().max().unwrap_or(0) == level)
                .collect()
        })
        .collect();
    let (lo, hi) = (elements.first()?.clone(), elements.last()?.clone());
    // smallest possible contribution of variables level.. to the objective
    let tail: Vec<LaurentNumber> = match objective {
        None => vec![LaurentNumber::zero(); nvars + 1],
        Some((alpha, _)) => {
            let mut t = vec![LaurentNumber::zero(); nvars + 1];
            for v in (0..nvars).rev() {
                let a = &alpha[v];
                let best = if a.is_negative() { hi.scale(a) } else { lo.scale(a) };
                t[v] = &t[v + 1] + &best;
            }
            t
        }
    };
    let mut point = vec![LaurentNumber::zero(); nvars];
    fn go(
        level: usize,
        partial: LaurentNumber,
        point: &mut Vec<LaurentNumber>,
        ready: &[Vec<&Atom>],
        objective: Option<(&[Rational], &LaurentNumber)>,
        tail: &[LaurentNumber],
        elements: &[LaurentNumber],
    ) -> bool {
        if let Some((_, u)) = objective {
            if &(&partial + &tail[level]) > u {
                return false;
            }
        }
        if level == point.len() {
            return true;
        }
        for x in elements {
            point[level] = x.clone();
            if ready[level].iter().all(|a| a.evaluate(point)) {
                let next = match objective {
                    Some((alpha, _)) => &partial + &x.scale(&alpha[level]),
                    None => partial.clone(),
                };
                if go(level + 1, next, point, ready, objective, tail, elements) {
                    return true;
                }
            }
        }
        false
    }
    if atoms.iter().any(|a| a.vars().is_empty() && !a.evaluate(&[])) {
        return None;
    }
    go(0, LaurentNumber::zero(), &mut point, &ready, objective, &tail, elements).then_some(point)
}

/// Minimum of the instance objective over `grid^n`, by full enumeration.
pub fn grid_minimum(
    instance: &VcspInstance,
    language: &Language,
    grid: &[LaurentNumber],
) -> Option<LaurentNumber> {
    let n = instance.num_vars;
    let total = grid.len().pow(n as u32);
    let mut best: Option<LaurentNumber> = None;
    for mut idx in 0..total {
        let mut point = vec![LaurentNumber::zero(); n];
        for slot in point.iter_mut().rev() {
            *slot = grid[idx % grid.len()].clone();
            idx /= grid.len();
        }
        if let Some(c) = evaluate_instance(instance, language, &point).unwrap() {
            if best.as_ref().is_none_or(|b| c < *b) {
                best = Some(c);
            }
        }
    }
    best
}

fn eval_term_rational(t: &Term, point: &[Rational]) -> Rational {
    match t {
        Term::Scaled { coeff, var } => coeff * &point[*var],
        Term::Const(k) => k.as_rational().expect("rational constant"),
    }
}

fn eval_f_rational(f: &PlhCostFunction, point: &[Rational]) -> Option<Rational> {
    let lifted: Vec<LaurentNumber> = point.iter().cloned().map(LaurentNumber::from_rational).collect();
    let mut hit = None;
    for p in &f.pieces {
        if p.guard.iter().all(|a| a.evaluate(&lifted)) {
            assert!(hit.is_none(), "overlapping guards in {}", f.name);
            hit = Some(eval_term_rational(&p.value, point));
        }
    }
    hit
}

/// Optimum of a finite base instance over `domain^n`; summands that do not
/// name a table use `f`.
pub fn base_optimum(f: &PlhCostFunction, base: &FiniteInstance, domain: &BTreeSet<Rational>) -> Option<Rational> {
    let values: Vec<&Rational> = domain.iter().collect();
    let tables: BTreeMap<&str, _> = base.tables.iter().map(|t| (t.name.as_str(), t)).collect();
    let mut best: Option<Rational> = None;
    let mut counter = vec![0usize; base.num_vars];
    loop {
        let point: Vec<Rational> = counter.iter().map(|&i| values[i].clone()).collect();
        let mut sum = Some(Rational::zero());
        for s in &base.summands {
            let args: Vec<Rational> = s.args.iter().map(|&v| point[v].clone()).collect();
            let c = match tables.get(s.function.as_str()) {
                Some(t) => t.entries.get(&args).cloned(),
                None => eval_f_rational(f, &args),
            };
            sum = match (sum, c) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            };
        }
        if let Some(s) = sum {
            if best.as_ref().is_none_or(|b| s < *b) {
                best = Some(s);
            }
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == counter.len() {
                return best;
            }
            counter[i] += 1;
            if counter[i] < values.len() {
                break;
            }
            counter[i] = 0;
            i += 1;
        }
    }
}

/// `|k|·∏|h_i|^{e_i}` over the distinct `|h_i| ≠ 1`, for every exponent
/// vector with `Σ|e_i| < d`.
pub fn naive_c_set(h: &[Rational], k: &[LaurentNumber], d: usize) -> BTreeSet<LaurentNumber> {
    let bases: Vec<Rational> = h
        .iter()
        .map(|x| x.abs())
        .filter(|x| !x.is_one() && !x.is_zero())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    fn go(bases: &[Rational], budget: i32, prod: Rational, out: &mut BTreeSet<Rational>) {
        let Some((b, rest)) = bases.split_first() else {
            out.insert(prod);
            return;
        };
        for e in -budget..=budget {
            let mut p = prod.clone();
            for _ in 0..e.abs() {
                p = if e > 0 { p * b } else { p / b };
            }
            go(rest, budget - e.abs(), p, out);
        }
    }
    let mut products = BTreeSet::new();
    go(&bases, d as i32 - 1, Rational::one(), &mut products);
    let mut out = BTreeSet::new();
    let mut ks: Vec<LaurentNumber> = k.to_vec();
    ks.push(LaurentNumber::one());
    for kv in ks {
        for p in &products {
            out.insert(kv.abs().scale(p));
        }
    }
    out
}

/// `H` and `K` read directly off normalized atoms.
pub fn naive_hk(atoms: &[Atom]) -> (Vec<Rational>, Vec<LaurentNumber>) {
    let mut h = Vec::new();
    let mut k = Vec::new();
    for a in atoms {
        if let Atom::Cmp { lhs, rhs, .. } = a {
            match (lhs, rhs) {
                (Term::Scaled { coeff: c1, .. }, Term::Scaled { coeff: c2, .. }) => h.push(c1 / c2),
                (Term::Scaled { coeff, .. }, Term::Const(c)) | (Term::Const(c), Term::Scaled { coeff, .. }) => {
                    k.push(c.scale(&coeff.recip()))
                }
                _ => {}
            }
        }
    }
    (h, k)
}

/// Size of `−C* ∪ {0} ∪ C*` with perturbation exponent `p`.
pub fn naive_sample(c: &BTreeSet<LaurentNumber>, d: usize, p: i32) -> BTreeSet<LaurentNumber> {
    let mut out = BTreeSet::new();
    out.insert(LaurentNumber::zero());
    for x in c.iter().filter(|x| !x.is_zero()) {
        for n in -(d as i64)..=(d as i64) {
            let pert = LaurentNumber::monomial(Rational::from_integer(n.into()), p);
            let y = x + &(x * &pert);
            out.insert(-&y);
            out.insert(y);
        }
    }
    out
}
