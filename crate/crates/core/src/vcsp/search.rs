//! Depth-first branch and bound over assignments into a finite grid, with
//! cost functions compiled to atom truth tables and value columns.

use crate::error::{Error, Result};
use crate::numbers::{CostValue, LaurentNumber, PackedCodec, PackedValue};
use crate::sampler::SampleDomain;
use crate::syntax::{Atom, Language, PlhCostFunction, Term, Var, VcspInstance};
use crate::tables::AtomTable;

/// Largest tuple space enumerated to precompute a summand's minimum cost.
const BOUND_ENUMERATION: usize = 2_000_000;

enum Value<V> {
    Column(Var, Vec<V>),
    Const(V),
}

struct CompiledPiece<V> {
    guard: Vec<usize>,
    value: Value<V>,
}

/// A cost function tabulated over a grid.
pub(crate) struct CompiledFunction<V> {
    tables: Vec<AtomTable>,
    pieces: Vec<CompiledPiece<V>>,
}

impl<V: CostValue> CompiledFunction<V> {
    pub fn new(f: &PlhCostFunction, grid: &[LaurentNumber], encode: &impl Fn(&LaurentNumber) -> V) -> Self {
        let mut atoms: Vec<Atom> = Vec::new();
        let mut tables = Vec::new();
        let mut pieces = Vec::new();
        for p in &f.pieces {
            let mut guard = Vec::new();
            for a in &p.guard {
                let i = match atoms.iter().position(|b| b == a) {
                    Some(i) => i,
                    None => {
                        atoms.push(a.clone());
                        tables.push(AtomTable::build(a, grid));
                        atoms.len() - 1
                    }
                };
                guard.push(i);
            }
            let value = match &p.value {
                Term::Scaled { coeff, var } => {
                    Value::Column(*var, grid.iter().map(|x| encode(&x.scale(coeff))).collect())
                }
                Term::Const(k) => Value::Const(encode(k)),
            };
            pieces.push(CompiledPiece { guard, value });
        }
        CompiledFunction {
            tables,
            pieces,
        }
    }

    /// Cost at grid indices `point[0..arity]`; `None` is `+∞`.
    #[inline]
    pub fn cost(&self, value_of: impl Fn(Var) -> usize + Copy) -> Option<&V> {
        for p in &self.pieces {
            if p.guard.iter().all(|&t| self.tables[t].holds(value_of)) {
                return Some(match &p.value {
                    Value::Column(v, col) => &col[value_of(*v)],
                    Value::Const(c) => c,
                });
            }
        }
        None
    }
}

/// An instance compiled against a grid.
pub(crate) struct Compiled<V> {
    pub n: usize,
    pub num_vars: usize,
    functions: Vec<CompiledFunction<V>>,
    summands: Vec<(usize, Vec<Var>)>,
    /// Visiting order of grid indices: rationals first, then by absolute
    /// value, positive before negative.
    order: Vec<usize>,
}

pub(crate) enum Mode<V> {
    Minimize,
    AtMost(V),
    Feasible,
}

impl<V: CostValue> Compiled<V> {
    pub fn new(
        instance: &VcspInstance,
        language: &Language,
        grid: &[LaurentNumber],
        encode: &impl Fn(&LaurentNumber) -> V,
    ) -> Result<Self> {
        instance.validate_against(language)?;
        let names = instance.used_functions();
        let mut functions = Vec::new();
        for name in &names {
            functions.push(CompiledFunction::new(language.require(name)?, grid, encode));
        }
        let summands = instance
            .summands
            .iter()
            .map(|s| (names.iter().position(|n| *n == s.function).unwrap(), s.args.clone()))
            .collect();
        let mut order: Vec<usize> = (0..grid.len()).collect();
        order.sort_by_key(|&i| (!grid[i].is_rational(), grid[i].abs(), grid[i].is_negative()));
        Ok(Compiled {
            n: grid.len(),
            order,
            num_vars: instance.num_vars,
            functions,
            summands,
        })
    }

    fn summand_cost(&self, s: usize, assignment: &[usize]) -> Option<&V> {
        let (f, args) = &self.summands[s];
        self.functions[*f].cost(|v| assignment[args[v]])
    }

    /// Objective at a full assignment of grid indices.
    pub fn evaluate(&self, assignment: &[usize]) -> Option<V> {
        let mut total = V::zero();
        for s in 0..self.summands.len() {
            total = total.add(self.summand_cost(s, assignment)?);
        }
        Some(total)
    }

    /// Searches assignments with `x_v` restricted to `allowed[v]`, visiting
    /// them lexicographically in `order`. Returns the first assignment that
    /// is strictly better than everything before it and optimal for `mode`.
    pub fn search(&self, mode: Mode<V>, allowed: &[Vec<bool>]) -> Option<(Vec<usize>, V)> {
        let nv = self.num_vars;
        let mut attached: Vec<Vec<usize>> = vec![Vec::new(); nv];
        let mut unary: Vec<Vec<usize>> = vec![Vec::new(); nv];
        let mut constant = V::zero();
        for (s, (_, args)) in self.summands.iter().enumerate() {
            match args.iter().max() {
                None => {}
                Some(&last) if args.iter().all(|&a| a == last) => unary[last].push(s),
                Some(&last) => attached[last].push(s),
            }
            if args.is_empty() {
                constant = constant.add(self.summand_cost(s, &[])?);
            }
        }

        // Per-variable candidate values with their unary cost.
        let mut candidates: Vec<Vec<(usize, V)>> = Vec::with_capacity(nv);
        let mut point = vec![0usize; nv];
        for v in 0..nv {
            let mut list = Vec::new();
            'values: for i in self.order.iter().copied().filter(|&i| allowed[v][i]) {
                point[v] = i;
                let mut c = V::zero();
                for &s in &unary[v] {
                    match self.summand_cost(s, &point) {
                        Some(x) => c = c.add(x),
                        None => continue 'values,
                    }
                }
                list.push((i, c));
            }
            if list.is_empty() {
                return None;
            }
            candidates.push(list);
        }

        let bounds = self.bounds(&candidates, allowed, &mode);
        let mut state = SearchState {
            compiled: self,
            attached: &attached,
            candidates: &candidates,
            bounds: &bounds,
            mode,
            point: vec![0; nv],
            best: None,
            done: false,
        };
        state.descend(0, constant);
        state.best
    }

    fn bounds(&self, candidates: &[Vec<(usize, V)>], allowed: &[Vec<bool>], mode: &Mode<V>) -> Bounds<V> {
        let nv = self.num_vars;
        let mut unary_suffix = vec![V::zero(); nv + 1];
        for v in (0..nv).rev() {
            let m = candidates[v].iter().map(|(_, c)| c).min().unwrap();
            unary_suffix[v] = unary_suffix[v + 1].add(m);
        }
        let mut summands = Vec::new();
        for (s, (_, args)) in self.summands.iter().enumerate() {
            let mut vars = args.clone();
            vars.sort_unstable();
            vars.dedup();
            if vars.len() < 2 {
                continue;
            }
            let partial = (vars.len() == 2).then(|| self.conditional_minimum(s, vars[0], vars[1], allowed));
            let static_min = match mode {
                Mode::Feasible => None,
                _ => self.summand_minimum(s, allowed),
            };
            summands.push(SummandBound {
                summand: s,
                first: vars[0],
                last: *vars.last().unwrap(),
                // a never-finite summand is left to the piece bounds
                static_min: static_min.flatten(),
                partial,
                pieces: self.piece_bounds(s, &vars, allowed),
            });
        }
        Bounds { unary_suffix, summands }
    }

    /// Per piece of summand `s`, lower bounds on its value that only read
    /// guard atoms over at most two of the summand's variables.
    fn piece_bounds(&self, s: usize, vars: &[Var], allowed: &[Vec<bool>]) -> Vec<PieceBound<V>> {
        let (f, args) = &self.summands[s];
        let function = &self.functions[*f];
        let over = |t: usize, set: &[Var]| function.tables[t].vars.iter().all(|&p| set.contains(&args[p]));
        function
            .pieces
            .iter()
            .map(|p| match &p.value {
                Value::Const(c) => PieceBound::Const(c.clone()),
                Value::Column(pos, col) => {
                    let vv = args[*pos];
                    let least = |atoms: &[usize], value_of: &dyn Fn(usize) -> usize| -> Option<V> {
                        (0..self.n)
                            .filter(|&j| allowed[vv][j])
                            .filter(|&j| {
                                atoms.iter().all(|&t| {
                                    function.tables[t].holds(|q| if args[q] == vv { j } else { value_of(q) })
                                })
                            })
                            .map(|j| &col[j])
                            .min()
                            .cloned()
                    };
                    let own: Vec<usize> = p.guard.iter().copied().filter(|&t| over(t, &[vv])).collect();
                    let base = least(&own, &|_| 0);
                    let mut by_other = Vec::new();
                    for &w in vars.iter().filter(|&&w| w != vv) {
                        let pair: Vec<usize> = p.guard.iter().copied().filter(|&t| over(t, &[vv, w])).collect();
                        if pair.len() == own.len() {
                            continue;
                        }
                        let table = (0..self.n).map(|i| least(&pair, &|_| i)).collect();
                        by_other.push((w, table));
                    }
                    PieceBound::Column {
                        pos: *pos,
                        base,
                        by_other,
                    }
                }
            })
            .collect()
    }

    /// `table[i]`: minimum of summand `s` over `w` with `u` at grid index
    /// `i`, or `None` when no allowed `w` makes it finite.
    fn conditional_minimum(&self, s: usize, u: Var, w: Var, allowed: &[Vec<bool>]) -> Vec<Option<V>> {
        let mut point = vec![0usize; self.num_vars];
        (0..self.n)
            .map(|i| {
                point[u] = i;
                let mut best: Option<V> = None;
                for j in (0..self.n).filter(|&j| allowed[w][j]) {
                    point[w] = j;
                    if let Some(c) = self.summand_cost(s, &point) {
                        if best.as_ref().is_none_or(|b| c < b) {
                            best = Some(c.clone());
                        }
                    }
                }
                best
            })
            .collect()
    }

    /// Minimum of one summand over the allowed grid points: `None` when too
    /// large to enumerate, `Some(None)` when the summand is never finite.
    fn summand_minimum(&self, s: usize, allowed: &[Vec<bool>]) -> Option<Option<V>> {
        let (_, args) = &self.summands[s];
        let mut vars: Vec<Var> = args.clone();
        vars.sort_unstable();
        vars.dedup();
        let size = vars
            .iter()
            .try_fold(1usize, |acc, _| acc.checked_mul(self.n))
            .filter(|&s| s <= BOUND_ENUMERATION)?;
        let mut point = vec![0usize; self.num_vars];
        let mut best: Option<V> = None;
        'outer: for idx in 0..size {
            let mut rest = idx;
            for &v in &vars {
                point[v] = rest % self.n;
                rest /= self.n;
                if !allowed[v][point[v]] {
                    continue 'outer;
                }
            }
            if let Some(c) = self.summand_cost(s, &point) {
                if best.as_ref().is_none_or(|b| c < b) {
                    best = Some(c.clone());
                }
            }
        }
        Some(best)
    }
}

enum PieceBound<V> {
    Const(V),
    Column {
        /// Argument position whose column gives the value.
        pos: usize,
        /// Least value allowed by the guard atoms over that variable alone,
        /// `None` when there is none.
        base: Option<V>,
        /// For another variable `w`: the least value given `w`'s grid index,
        /// under the guard atoms over the two variables.
        by_other: Vec<(Var, Vec<Option<V>>)>,
    },
}

/// Lower-bound data for a summand over at least two distinct variables.
struct SummandBound<V> {
    summand: usize,
    first: Var,
    last: Var,
    /// Exact minimum over all allowed points, when it was enumerated.
    static_min: Option<V>,
    /// For two variables: the minimum given the first one's value.
    partial: Option<Vec<Option<V>>>,
    pieces: Vec<PieceBound<V>>,
}

struct Bounds<V> {
    /// `unary_suffix[k]`: sum of the least unary costs of variables `k..`.
    unary_suffix: Vec<V>,
    summands: Vec<SummandBound<V>>,
}

impl<V: CostValue> Bounds<V> {
    /// Lower bound on the cost still to come once variables `..level` are
    /// fixed to `point`, or `None` when the partial point is already
    /// infeasible.
    fn remaining(&self, compiled: &Compiled<V>, level: usize, point: &[usize]) -> Option<V> {
        let mut total = self.unary_suffix[level].clone();
        for sb in self.summands.iter().filter(|sb| sb.last >= level) {
            let m = match (&sb.partial, &sb.static_min) {
                (Some(table), _) if sb.first < level => table[point[sb.first]].clone()?,
                (_, Some(m)) if sb.first >= level => m.clone(),
                _ => sb.piece_minimum(compiled, level, point)?,
            };
            total = total.add(&m);
        }
        Some(total)
    }
}

impl<V: CostValue> SummandBound<V> {
    /// Least value over the pieces whose guards the fixed variables do not
    /// refute; `None` when every piece is refuted.
    fn piece_minimum(&self, compiled: &Compiled<V>, level: usize, point: &[usize]) -> Option<V> {
        let (f, args) = &compiled.summands[self.summand];
        let function = &compiled.functions[*f];
        let fixed = |q: usize| (args[q] < level).then(|| point[args[q]]);
        let mut best: Option<V> = None;
        for (piece, bound) in function.pieces.iter().zip(&self.pieces) {
            if piece
                .guard
                .iter()
                .any(|&t| function.tables[t].partial(&fixed) == Some(false))
            {
                continue;
            }
            let value = match (bound, &piece.value) {
                (PieceBound::Const(c), _) => Some(c.clone()),
                (PieceBound::Column { pos, .. }, Value::Column(_, col)) if args[*pos] < level => {
                    Some(col[point[args[*pos]]].clone())
                }
                (PieceBound::Column { base, by_other, .. }, _) => {
                    let mut lb = base.clone();
                    for (w, table) in by_other.iter().filter(|(w, _)| *w < level) {
                        lb = match (lb, &table[point[*w]]) {
                            (Some(a), Some(b)) => Some(if *b > a { b.clone() } else { a }),
                            _ => None,
                        };
                    }
                    lb
                }
            };
            if let Some(v) = value {
                if best.as_ref().is_none_or(|b| v < *b) {
                    best = Some(v);
                }
            }
        }
        best
    }
}

struct SearchState<'a, V> {
    compiled: &'a Compiled<V>,
    attached: &'a [Vec<usize>],
    candidates: &'a [Vec<(usize, V)>],
    bounds: &'a Bounds<V>,
    mode: Mode<V>,
    point: Vec<usize>,
    best: Option<(Vec<usize>, V)>,
    done: bool,
}

impl<V: CostValue> SearchState<'_, V> {
    fn pruned(&self, level: usize, cost: &V) -> bool {
        let Some(bound) = self.bounds.remaining(self.compiled, level, &self.point) else {
            return true;
        };
        let optimistic = cost.add(&bound);
        match &self.mode {
            Mode::Minimize => self.best.as_ref().is_some_and(|(_, b)| optimistic >= *b),
            Mode::AtMost(u) => optimistic > *u,
            Mode::Feasible => false,
        }
    }

    fn descend(&mut self, level: usize, cost: V) {
        if self.done || self.pruned(level, &cost) {
            return;
        }
        if level == self.compiled.num_vars {
            let accept = match &self.mode {
                Mode::Minimize => self.best.as_ref().is_none_or(|(_, b)| cost < *b),
                Mode::AtMost(u) => cost <= *u,
                Mode::Feasible => true,
            };
            if accept {
                self.done = !matches!(self.mode, Mode::Minimize);
                self.best = Some((self.point.clone(), cost));
            }
            return;
        }
        for (i, unary) in &self.candidates[level] {
            self.point[level] = *i;
            let mut c = cost.add(unary);
            let mut finite = true;
            for &s in &self.attached[level] {
                match self.compiled.summand_cost(s, &self.point) {
                    Some(x) => c = c.add(x),
                    None => {
                        finite = false;
                        break;
                    }
                }
            }
            if finite {
                self.descend(level + 1, c);
            }
            if self.done {
                return;
            }
        }
    }
}

/// The instance compiled with the fastest value type that represents every
/// cost exactly.
pub(crate) enum Engine {
    Packed(Compiled<PackedValue>, PackedCodec),
    Exact(Compiled<LaurentNumber>),
}

impl Engine {
    /// `extra` lists further values (thresholds) that must be encodable.
    pub fn new(
        instance: &VcspInstance,
        language: &Language,
        grid: &SampleDomain,
        extra: &[LaurentNumber],
    ) -> Result<Self> {
        let mut values: Vec<LaurentNumber> = extra.to_vec();
        for name in instance.used_functions() {
            for p in &language.require(name)?.pieces {
                match &p.value {
                    Term::Scaled { coeff, .. } => values.extend(grid.elements().iter().map(|x| x.scale(coeff))),
                    Term::Const(k) => values.push(k.clone()),
                }
            }
        }
        // Encoded values stay below 2^96, so sums over any realistic number
        // of summands fit in i128.
        match PackedCodec::for_values(&values) {
            Some(codec) => {
                let encode = |x: &LaurentNumber| codec.encode(x).expect("value admitted by the codec");
                let compiled = Compiled::new(instance, language, grid.elements(), &encode)?;
                Ok(Engine::Packed(compiled, codec))
            }
            None => Ok(Engine::Exact(Compiled::new(
                instance,
                language,
                grid.elements(),
                &|x: &LaurentNumber| x.clone(),
            )?)),
        }
    }

    pub fn num_vars(&self) -> usize {
        match self {
            Engine::Packed(c, _) => c.num_vars,
            Engine::Exact(c) => c.num_vars,
        }
    }

    pub fn grid_size(&self) -> usize {
        match self {
            Engine::Packed(c, _) => c.n,
            Engine::Exact(c) => c.n,
        }
    }

    pub fn full_domains(&self) -> Vec<Vec<bool>> {
        vec![vec![true; self.grid_size()]; self.num_vars()]
    }

    pub fn evaluate(&self, assignment: &[usize]) -> Option<LaurentNumber> {
        match self {
            Engine::Packed(c, codec) => c.evaluate(assignment).map(|v| codec.decode(&v)),
            Engine::Exact(c) => c.evaluate(assignment),
        }
    }

    pub fn minimize(&self, allowed: &[Vec<bool>]) -> Option<(Vec<usize>, LaurentNumber)> {
        match self {
            Engine::Packed(c, codec) => c.search(Mode::Minimize, allowed).map(|(a, v)| (a, codec.decode(&v))),
            Engine::Exact(c) => c.search(Mode::Minimize, allowed),
        }
    }

    pub fn feasible(&self, allowed: &[Vec<bool>]) -> Option<Vec<usize>> {
        match self {
            Engine::Packed(c, _) => c.search(Mode::Feasible, allowed).map(|(a, _)| a),
            Engine::Exact(c) => c.search(Mode::Feasible, allowed).map(|(a, _)| a),
        }
    }

    /// First assignment (in search order) of cost at most `u`.
    pub fn at_most(&self, u: &LaurentNumber, allowed: &[Vec<bool>]) -> Result<Option<(Vec<usize>, LaurentNumber)>> {
        Ok(match self {
            Engine::Packed(c, codec) => match codec.encode(u) {
                Some(pu) => c.search(Mode::AtMost(pu), allowed).map(|(a, v)| (a, codec.decode(&v))),
                None => {
                    return Err(Error::Invariant(format!(
                        "threshold {u} is not representable in the packed cost domain"
                    )))
                }
            },
            Engine::Exact(c) => c.search(Mode::AtMost(u.clone()), allowed),
        })
    }
}
