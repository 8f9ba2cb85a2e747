//! Grid submodularity checks and the maximal-tractability constructions:
//! `χ_D`, canonical extensions of finite tables, and the hardness gadget.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::fm::check_guards_disjoint;
use crate::limits::Limits;
use crate::numbers::{concretize_epsilon, CostValue, LaurentNumber, PackedCodec, Rational};
use crate::qe::evaluate_cost;
use crate::sampler::{build_vcsp_sample, grid_from_values, AtomSet, Regime, SampleDomain};
use crate::syntax::{
    Atom, FiniteCostTable, FiniteInstance, Language, Piece, PlhCostFunction, Summand, Term, VcspInstance,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Submodularity {
    /// The inequality holds for every pair of grid points. Says nothing
    /// about points off the grid.
    PassOnGrid,
    Violation(Vec<LaurentNumber>, Vec<LaurentNumber>),
}

/// The VCSP sample of the function's own atoms at `d = 2·arity`, with `d`
/// lowered until the pair scan fits its cap.
pub fn default_grid(f: &PlhCostFunction, limits: &Limits) -> Result<SampleDomain> {
    let phi = AtomSet::of_function(f);
    let mut d = (2 * f.arity).max(1);
    loop {
        let grid = build_vcsp_sample(&phi, d);
        let fits = grid_scan_fits(grid.len(), f.arity, limits).is_ok();
        if fits || d == 1 {
            return Ok(grid);
        }
        d -= 1;
    }
}

fn grid_scan_fits(n: usize, arity: usize, limits: &Limits) -> Result<usize> {
    let total = limits.check_enumeration("grid points", n, arity)?;
    limits.check_pairs("submodularity pairs", total)?;
    Ok(total as usize)
}

fn decode_point(mut index: usize, n: usize, arity: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    out
}

fn scan<V: CostValue>(costs: &[Option<V>], n: usize, arity: usize) -> Option<(usize, usize)> {
    let points: Vec<usize> = (0..costs.len()).flat_map(|i| decode_point(i, n, arity)).collect();
    let at = |i: usize| &points[i * arity..(i + 1) * arity];
    for i in 0..costs.len() {
        let Some(fx) = &costs[i] else { continue };
        let x = at(i);
        for j in i + 1..costs.len() {
            let Some(fy) = &costs[j] else { continue };
            let y = at(j);
            let (mut h, mut l) = (0, 0);
            for (a, b) in x.iter().zip(y) {
                h = h * n + a.max(b);
                l = l * n + a.min(b);
            }
            // comparable points: max and min are the pair itself
            if h == j && l == i {
                continue;
            }
            let holds = match (&costs[h], &costs[l]) {
                (Some(fh), Some(fl)) => fh.add(fl) <= fx.add(fy),
                _ => false,
            };
            if !holds {
                return Some((i, j));
            }
        }
    }
    None
}

/// The first violating pair in lexicographic order of grid points, if any.
pub fn find_violation_witness(
    f: &PlhCostFunction,
    grid: &SampleDomain,
    limits: &Limits,
) -> Result<Option<(Vec<LaurentNumber>, Vec<LaurentNumber>)>> {
    let n = grid.len();
    let total = grid_scan_fits(n, f.arity, limits)?;
    let elements = grid.elements();
    let point = |i: usize| -> Vec<LaurentNumber> {
        decode_point(i, n, f.arity).into_iter().map(|k| elements[k].clone()).collect()
    };
    let costs: Vec<Option<LaurentNumber>> = (0..total)
        .map(|i| evaluate_cost(f, &point(i)))
        .collect::<Result<_>>()?;
    let codec = PackedCodec::for_values(costs.iter().flatten());
    let hit = match codec.and_then(|c| {
        costs
            .iter()
            .map(|v| match v {
                Some(v) => c.encode(v).map(Some),
                None => Some(None),
            })
            .collect::<Option<Vec<Option<_>>>>()
    }) {
        Some(packed) => scan(&packed, n, f.arity),
        None => scan(&costs, n, f.arity),
    };
    Ok(hit.map(|(i, j)| (point(i), point(j))))
}

/// `f(max(x,y)) + f(min(x,y)) ≤ f(x) + f(y)` on every pair of grid points
/// of finite cost, where `max` and `min` must also have finite cost.
pub fn check_submodular(f: &PlhCostFunction, grid: &SampleDomain, limits: &Limits) -> Result<Submodularity> {
    Ok(match find_violation_witness(f, grid, limits)? {
        None => Submodularity::PassOnGrid,
        Some((a, b)) => Submodularity::Violation(a, b),
    })
}

fn violates(f: &PlhCostFunction, a: &[LaurentNumber], b: &[LaurentNumber]) -> Result<bool> {
    let hi: Vec<LaurentNumber> = a.iter().zip(b).map(|(x, y)| x.max(y).clone()).collect();
    let lo: Vec<LaurentNumber> = a.iter().zip(b).map(|(x, y)| x.min(y).clone()).collect();
    let (Some(fa), Some(fb)) = (evaluate_cost(f, a)?, evaluate_cost(f, b)?) else {
        return Ok(false);
    };
    Ok(match (evaluate_cost(f, &hi)?, evaluate_cost(f, &lo)?) {
        (Some(fh), Some(fl)) => &fh + &fl > &fa + &fb,
        _ => true,
    })
}

/// Replaces `ε` in a violating pair by a rational small enough that the
/// pair still violates submodularity, trying successively smaller values.
pub fn rationalize_violation(
    f: &PlhCostFunction,
    a: &[LaurentNumber],
    b: &[LaurentNumber],
) -> Result<Option<(Vec<Rational>, Vec<Rational>)>> {
    let mut values: Vec<LaurentNumber> = a.iter().chain(b).cloned().collect();
    values.extend(f.guard_atoms().flat_map(|at| at.constants()).cloned());
    let mut eps = concretize_epsilon(&values);
    for _ in 0..64 {
        let ra: Vec<Rational> = a.iter().map(|x| x.evaluate_at(&eps)).collect();
        let rb: Vec<Rational> = b.iter().map(|x| x.evaluate_at(&eps)).collect();
        let lift = |v: &[Rational]| -> Vec<LaurentNumber> {
            v.iter().cloned().map(LaurentNumber::from_rational).collect()
        };
        if violates(f, &lift(&ra), &lift(&rb))? {
            return Ok(Some((ra, rb)));
        }
        eps /= Rational::from_integer(2.into());
    }
    Ok(None)
}

/// `χ_D`: cost 0 on `D`, `+∞` elsewhere.
pub fn chi_d(name: &str, domain: &BTreeSet<Rational>) -> PlhCostFunction {
    let pieces = domain
        .iter()
        .map(|d| Piece {
            value: Term::rational(Rational::from_integer(0.into())),
            guard: vec![Atom::eq(Term::var(0), Term::rational(d.clone()))],
        })
        .collect();
    PlhCostFunction::new(name, 1, pieces)
}

/// The PLH function agreeing with `table` on `D^n` and `+∞` elsewhere.
/// Costs are arbitrary rationals, so each piece takes a constant value.
pub fn canonical_extension(name: &str, table: &FiniteCostTable, domain: &BTreeSet<Rational>) -> PlhCostFunction {
    let pieces = table
        .entries
        .iter()
        .filter(|(point, _)| point.iter().all(|x| domain.contains(x)))
        .map(|(point, cost)| Piece {
            value: Term::rational(cost.clone()),
            guard: point
                .iter()
                .enumerate()
                .map(|(i, x)| Atom::eq(Term::var(i), Term::rational(x.clone())))
                .collect(),
        })
        .collect();
    PlhCostFunction::new(name, table.arity, pieces)
}

/// The transformed instance `J` and its language.
#[derive(Clone, Debug)]
pub struct Gadget {
    pub domain: BTreeSet<Rational>,
    pub language: Language,
    pub instance: VcspInstance,
}

pub const CHI_NAME: &str = "chi_D";

/// Builds `J` from a finite base instance `I` over `D = {a_i, b_i}`:
/// table summands become canonical extensions, summands naming `f` keep
/// `f`, and every variable gets a `χ_D` summand.
pub fn build_hardness_gadget(
    f: &PlhCostFunction,
    witness: (&[Rational], &[Rational]),
    base: &FiniteInstance,
) -> Result<Gadget> {
    let (a, b) = witness;
    if a.len() != f.arity || b.len() != f.arity {
        return Err(Error::ArityMismatch(format!(
            "witness points for `{}` must have {} coordinates",
            f.name, f.arity
        )));
    }
    let lift = |v: &[Rational]| -> Vec<LaurentNumber> { v.iter().cloned().map(LaurentNumber::from_rational).collect() };
    if !violates(f, &lift(a), &lift(b))? {
        return Err(Error::Invalid(format!("the witness pair does not violate submodularity of `{}`", f.name)));
    }
    let domain: BTreeSet<Rational> = a.iter().chain(b).cloned().collect();
    for t in &base.tables {
        if let Some((point, _)) = t.entries.iter().find(|(p, _)| p.iter().any(|x| !domain.contains(x))) {
            let show = |xs: &mut dyn Iterator<Item = &Rational>| xs.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
            return Err(Error::Invalid(format!(
                "table `{}` has an entry at ({}) outside the domain {{{}}}",
                t.name,
                show(&mut point.iter()),
                show(&mut domain.iter())
            )));
        }
    }
    let mut functions = vec![f.clone()];
    let mut renamed: BTreeMap<&str, String> = BTreeMap::new();
    for t in &base.tables {
        let mut name = t.name.clone();
        while name == f.name || name == CHI_NAME || base.tables.iter().any(|u| u.name == name && !std::ptr::eq(u, t)) {
            name.push_str("_hat");
        }
        functions.push(canonical_extension(&name, t, &domain));
        renamed.insert(&t.name, name);
    }
    functions.push(chi_d(CHI_NAME, &domain));
    for g in &functions {
        check_guards_disjoint(g)?;
    }
    let language = Language::new(functions);
    let mut summands = Vec::new();
    for s in &base.summands {
        let function = match renamed.get(s.function.as_str()) {
            Some(n) => n.clone(),
            None if s.function == f.name => f.name.clone(),
            None => return Err(Error::UnknownSymbol(s.function.clone())),
        };
        summands.push(Summand::new(function, s.args.clone()));
    }
    for v in 0..base.num_vars {
        summands.push(Summand::new(CHI_NAME, vec![v]));
    }
    let instance = VcspInstance::new(base.num_vars, summands);
    instance.validate_against(&language)?;
    Ok(Gadget {
        domain,
        language,
        instance,
    })
}

/// Exhaustive optimum of the base instance over `D^{|V|}`; summands naming
/// `f` use `f` restricted to `D`. `None` means every assignment costs `+∞`.
pub fn finite_optimum(
    f: &PlhCostFunction,
    base: &FiniteInstance,
    domain: &BTreeSet<Rational>,
    limits: &Limits,
) -> Result<Option<Rational>> {
    let values: Vec<Rational> = domain.iter().cloned().collect();
    let n = values.len();
    let total = limits.check_enumeration("finite assignments", n, base.num_vars)? as usize;
    let tables: BTreeMap<&str, &FiniteCostTable> = base.tables.iter().map(|t| (t.name.as_str(), t)).collect();
    let mut best: Option<Rational> = None;
    'points: for idx in 0..total {
        let point: Vec<Rational> = decode_point(idx, n.max(1), base.num_vars)
            .into_iter()
            .map(|k| values[k].clone())
            .collect();
        let mut sum = Rational::from_integer(0.into());
        for s in &base.summands {
            let args: Vec<Rational> = s.args.iter().map(|&v| point[v].clone()).collect();
            let cost = if let Some(t) = tables.get(s.function.as_str()) {
                t.entries.get(&args).cloned()
            } else if s.function == f.name {
                let lifted: Vec<LaurentNumber> = args.into_iter().map(LaurentNumber::from_rational).collect();
                match evaluate_cost(f, &lifted)? {
                    Some(v) => Some(v.as_rational().ok_or_else(|| {
                        Error::NonRationalConstant(format!("`{}` takes value {v} on a rational point", f.name))
                    })?),
                    None => None,
                }
            } else {
                return Err(Error::UnknownSymbol(s.function.clone()));
            };
            match cost {
                Some(c) => sum += c,
                None => continue 'points,
            }
        }
        if best.as_ref().is_none_or(|b| sum < *b) {
            best = Some(sum);
        }
    }
    Ok(best)
}

/// A grid made of the given rationals, for checks over a finite domain.
pub fn rational_grid(values: &BTreeSet<Rational>) -> SampleDomain {
    grid_from_values(values.iter().cloned().map(LaurentNumber::from_rational), Regime::Vcsp)
}
