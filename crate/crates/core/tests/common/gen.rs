//! Seeded random generators for instances, formulas and Laurent numbers.

use std::collections::BTreeSet;

use plh_core::analysis::{check_submodular, default_grid, rational_grid, Submodularity};
use plh_core::numbers::{rat, ratio, LaurentNumber, Rational};
use plh_core::syntax::{
    Atom, FoFormula, Language, Piece, PlhCostFunction, RelationDef, RelationSet, Summand, Term, Var, VcspInstance,
};
use plh_core::Limits;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn coeff(r: &mut Rng8) -> i64 {
    *[-3, -2, -1, 1, 2, 3].choose(r).unwrap()
}

pub fn pos_coeff(r: &mut Rng8) -> i64 {
    r.gen_range(1..=3)
}

pub fn small_const(r: &mut Rng8) -> i64 {
    r.gen_range(-3..=3)
}

fn scaled(c: i64, v: Var) -> Term {
    Term::scaled(rat(c), v)
}

fn konst(k: i64) -> Term {
    Term::rational(rat(k))
}

fn oriented(r: &mut Rng8, a: Term, b: Term, eq_weight: f64) -> Atom {
    if r.gen_bool(eq_weight) {
        Atom::eq(a, b)
    } else if r.gen_bool(0.5) {
        Atom::lt(a, b)
    } else {
        Atom::lt(b, a)
    }
}

/// A random unary or binary atom over variables `0..nvars`.
pub fn random_atom(r: &mut Rng8, nvars: usize) -> Atom {
    let x = r.gen_range(0..nvars);
    if nvars == 1 || r.gen_bool(0.4) {
        let c = coeff(r);
        let k = small_const(r);
        oriented(r, scaled(c, x), konst(k), 0.15)
    } else {
        let mut y = r.gen_range(0..nvars - 1);
        if y >= x {
            y += 1;
        }
        let (a, b) = (coeff(r), coeff(r));
        oriented(r, scaled(a, x), scaled(b, y), 0.15)
    }
}

pub fn random_conjunction(r: &mut Rng8, nvars: usize, natoms: usize) -> Vec<Atom> {
    (0..natoms).map(|_| random_atom(r, nvars)).collect()
}

/// `a·x_p` and a right-hand side `t` that is a positively scaled variable or
/// a constant, so that `a·x_p < t` is monotone in the right-hand variable.
fn upper_pair(r: &mut Rng8, p: Var, arity: usize) -> (Term, Term) {
    let lhs = scaled(pos_coeff(r), p);
    let others: Vec<Var> = (0..arity).filter(|&v| v != p).collect();
    let rhs = if others.is_empty() || r.gen_bool(0.3) {
        konst(small_const(r))
    } else {
        scaled(pos_coeff(r), *others.choose(r).unwrap())
    };
    (lhs, rhs)
}

fn max_closed_clause(r: &mut Rng8, arity: usize) -> FoFormula {
    let x = r.gen_range(0..arity);
    match r.gen_range(0..4) {
        0 => {
            let c = coeff(r);
            let k = small_const(r);
            FoFormula::Atom(oriented(r, scaled(c, x), konst(k), 0.2))
        }
        1 if arity >= 2 => {
            let y = (x + 1 + r.gen_range(0..arity - 1)) % arity;
            let sign = if r.gen_bool(0.5) { 1 } else { -1 };
            let (a, b) = (sign * pos_coeff(r), sign * pos_coeff(r));
            FoFormula::Atom(oriented(r, scaled(a, x), scaled(b, y), 0.2))
        }
        2 => {
            let n = r.gen_range(2..=3);
            // a·x < max(t_j) or a·x ≤ max(t_j), disjunct by disjunct
            let mut parts = Vec::new();
            for _ in 0..n {
                let (lhs, rhs) = upper_pair(r, x, arity);
                if r.gen_bool(0.3) {
                    parts.push(FoFormula::Atom(Atom::eq(lhs.clone(), rhs.clone())));
                }
                parts.push(FoFormula::Atom(Atom::lt(lhs, rhs)));
            }
            FoFormula::Or(parts)
        }
        _ if arity >= 2 => {
            // ∃w (a·x < b·w ∧ c·w < d·y): a projection of a max-closed set
            let y = (x + 1 + r.gen_range(0..arity - 1)) % arity;
            let w = arity;
            let body = FoFormula::And(vec![
                FoFormula::Atom(Atom::lt(scaled(pos_coeff(r), x), scaled(pos_coeff(r), w))),
                FoFormula::Atom(Atom::lt(scaled(pos_coeff(r), w), scaled(pos_coeff(r), y))),
            ]);
            FoFormula::exists(w, body)
        }
        _ => {
            let (lhs, rhs) = upper_pair(r, x, arity);
            FoFormula::Atom(Atom::lt(lhs, rhs))
        }
    }
}

/// A relation built only from max-closed clauses.
pub fn max_closed_relation(r: &mut Rng8, name: &str, arity: usize) -> RelationDef {
    let n = r.gen_range(1..=2);
    let clauses: Vec<FoFormula> = (0..n).map(|_| max_closed_clause(r, arity)).collect();
    RelationDef {
        name: name.to_string(),
        arity,
        formula: if clauses.len() == 1 {
            clauses.into_iter().next().unwrap()
        } else {
            FoFormula::And(clauses)
        },
    }
}

pub fn csp_case(r: &mut Rng8) -> (RelationSet, VcspInstance) {
    let nrel = r.gen_range(2..=3);
    let relations: Vec<RelationDef> = (0..nrel)
        .map(|i| {
            let arity = r.gen_range(1..=3);
            max_closed_relation(r, &format!("r{i}"), arity)
        })
        .collect();
    let num_vars = r.gen_range(1..=3);
    let ncons = r.gen_range(1..=4);
    let summands = (0..ncons)
        .map(|_| {
            let rel = relations.choose(r).unwrap();
            let args = (0..rel.arity).map(|_| r.gen_range(0..num_vars)).collect();
            Summand::new(rel.name.clone(), args)
        })
        .collect();
    (RelationSet { relations }, VcspInstance::new(num_vars, summands))
}

fn random_value(r: &mut Rng8, arity: usize) -> Term {
    if r.gen_bool(0.3) {
        konst(small_const(r))
    } else {
        scaled(small_const(r), r.gen_range(0..arity))
    }
}

/// Interval pieces of a unary function; any unary function is submodular.
fn unary_function(r: &mut Rng8, name: &str) -> PlhCostFunction {
    let mut breaks: Vec<i64> = (0..r.gen_range(1..=2)).map(|_| small_const(r)).collect();
    breaks.sort();
    breaks.dedup();
    let mut regions: Vec<Vec<Atom>> = vec![vec![Atom::lt(Term::var(0), konst(breaks[0]))]];
    for (i, &k) in breaks.iter().enumerate() {
        regions.push(vec![Atom::eq(Term::var(0), konst(k))]);
        match breaks.get(i + 1) {
            Some(&next) => regions.push(vec![Atom::lt(konst(k), Term::var(0)), Atom::lt(Term::var(0), konst(next))]),
            None => regions.push(vec![Atom::lt(konst(k), Term::var(0))]),
        }
    }
    let mut pieces = Vec::new();
    for guard in regions {
        if r.gen_bool(0.8) {
            pieces.push(Piece {
                value: random_value(r, 1),
                guard,
            });
        }
    }
    if pieces.is_empty() {
        pieces.push(Piece {
            value: random_value(r, 1),
            guard: vec![],
        });
    }
    PlhCostFunction::new(name, 1, pieces)
}

fn binary_function(r: &mut Rng8, name: &str) -> PlhCostFunction {
    let (a, b) = (pos_coeff(r), pos_coeff(r));
    let (x, y) = (scaled(a, 0), scaled(b, 1));
    let pieces = match r.gen_range(0..3) {
        // crisp order or proportionality, plus a modular value
        0 => {
            let guard = if r.gen_bool(0.7) { Atom::lt(x, y) } else { Atom::eq(x, y) };
            vec![Piece {
                value: random_value(r, 2),
                guard: vec![guard],
            }]
        }
        // max(a·x, b·y)
        1 => vec![
            Piece {
                value: x.clone(),
                guard: vec![Atom::lt(y.clone(), x.clone())],
            },
            Piece {
                value: y.clone(),
                guard: vec![Atom::lt(x.clone(), y.clone())],
            },
            Piece {
                value: x.clone(),
                guard: vec![Atom::eq(x, y)],
            },
        ],
        // min(a·x, −b·y)
        _ => {
            let ny = scaled(-b, 1);
            vec![
                Piece {
                    value: x.clone(),
                    guard: vec![Atom::lt(x.clone(), ny.clone())],
                },
                Piece {
                    value: ny.clone(),
                    guard: vec![Atom::lt(ny.clone(), x.clone())],
                },
                Piece {
                    value: x.clone(),
                    guard: vec![Atom::eq(x, ny)],
                },
            ]
        }
    };
    PlhCostFunction::new(name, 2, pieces)
}

fn max3(name: &str) -> PlhCostFunction {
    let v = Term::var;
    let p = |value: Var, guard: Vec<Atom>| Piece {
        value: v(value),
        guard,
    };
    PlhCostFunction::new(
        name,
        3,
        vec![
            p(0, vec![Atom::lt(v(1), v(0)), Atom::lt(v(2), v(0))]),
            p(0, vec![Atom::lt(v(1), v(0)), Atom::eq(v(2), v(0))]),
            p(0, vec![Atom::eq(v(1), v(0)), Atom::lt(v(2), v(0))]),
            p(0, vec![Atom::eq(v(1), v(0)), Atom::eq(v(2), v(0))]),
            p(1, vec![Atom::lt(v(0), v(1)), Atom::lt(v(2), v(1))]),
            p(1, vec![Atom::lt(v(0), v(1)), Atom::eq(v(2), v(1))]),
            p(2, vec![Atom::lt(v(0), v(2)), Atom::lt(v(1), v(2))]),
        ],
    )
}

/// Validation grid: the default grid, or a small mixed grid when the
/// default one is too large for the pair scan.
pub fn validation_grid(f: &PlhCostFunction) -> plh_core::sampler::SampleDomain {
    let limits = Limits::default();
    let grid = default_grid(f, &limits).unwrap();
    if limits.check_enumeration("pairs", grid.len(), 2 * f.arity).is_ok() {
        return grid;
    }
    let values: BTreeSet<Rational> = [-2, -1, 0, 1, 2, 3].into_iter().map(rat).chain([ratio(1, 2)]).collect();
    rational_grid(&values)
}

/// A random function of a submodular template, kept only if it passes the
/// grid check.
pub fn submodular_function(r: &mut Rng8, name: &str) -> PlhCostFunction {
    loop {
        let f = match r.gen_range(0..10) {
            0..=3 => unary_function(r, name),
            4..=8 => binary_function(r, name),
            _ => max3(name),
        };
        let grid = validation_grid(&f);
        if check_submodular(&f, &grid, &Limits::default()).unwrap() == Submodularity::PassOnGrid {
            return f;
        }
    }
}

pub fn vcsp_case(r: &mut Rng8, max_vars: usize, max_summands: usize) -> (Language, VcspInstance) {
    let nf = r.gen_range(2..=4);
    let functions: Vec<PlhCostFunction> = (0..nf).map(|i| submodular_function(r, &format!("f{i}"))).collect();
    let num_vars = r.gen_range(1..=max_vars);
    let ns = r.gen_range(1..=max_summands);
    let summands = (0..ns)
        .map(|_| {
            let f = functions.choose(r).unwrap();
            let args = (0..f.arity).map(|_| r.gen_range(0..num_vars)).collect();
            Summand::new(f.name.clone(), args)
        })
        .collect();
    (Language::new(functions), VcspInstance::new(num_vars, summands))
}

pub fn random_threshold(r: &mut Rng8) -> Rational {
    ratio(r.gen_range(-12..=12), 2)
}

/// A Laurent number with support in `[-2, 3]` and small coefficients.
pub fn laurent(r: &mut Rng8) -> LaurentNumber {
    let n = r.gen_range(0..=4);
    LaurentNumber::from_terms((0..n).map(|_| {
        let e = r.gen_range(-2..=3);
        let c = ratio(r.gen_range(-9..=9), r.gen_range(1..=4));
        (e, c)
    }))
}
