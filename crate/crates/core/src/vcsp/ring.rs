//! The ring family `C_f` of down-set encodings of feasible assignments, and
//! an exhaustive minimizer of set functions over it.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

use super::search::Engine;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::numbers::{CostValue, LaurentNumber};
use crate::sampler::SampleDomain;
use crate::syntax::{Language, VcspInstance};

/// A subset of the universe `Q × {0..d}`, as a bitset with element
/// `(q, i)` at position `i·|Q| + q`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct RingSet {
    bits: Vec<u64>,
}

impl RingSet {
    fn empty(size: usize) -> Self {
        RingSet {
            bits: vec![0; size.div_ceil(64)],
        }
    }

    fn insert(&mut self, pos: usize) {
        self.bits[pos / 64] |= 1 << (pos % 64);
    }

    pub fn contains_pos(&self, pos: usize) -> bool {
        self.bits[pos / 64] >> (pos % 64) & 1 == 1
    }

    pub fn union(&self, other: &RingSet) -> RingSet {
        RingSet {
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn intersection(&self, other: &RingSet) -> RingSet {
        RingSet {
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn is_subset(&self, other: &RingSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|w| *w == 0)
    }
}

/// Smallest feasible assignment with `x_v ≥ lower[v]` (sample indices), by
/// scanning each coordinate upward with feasibility queries.
fn minimal_with(engine: &Engine, lower: &[Option<usize>]) -> Option<Vec<usize>> {
    let n = engine.grid_size();
    let base: Vec<Vec<bool>> = lower
        .iter()
        .map(|lb| (0..n).map(|i| lb.is_none_or(|l| i >= l)).collect())
        .collect();
    engine.feasible(&base)?;
    let mut witnesses = Vec::new();
    let mut minimal = Vec::new();
    for v in 0..engine.num_vars() {
        let mut allowed = base.clone();
        let found = (0..n).filter(|&k| base[v][k]).find_map(|k| {
            allowed[v] = (0..n).map(|i| i == k).collect();
            engine.feasible(&allowed).map(|w| (k, w))
        });
        let (k, w) = found.expect("a feasible system has a feasible value for every variable");
        minimal.push(k);
        witnesses.push(w);
    }
    let combined: Vec<usize> = (0..engine.num_vars())
        .map(|v| witnesses.iter().map(|w| w[v]).min().unwrap())
        .collect();
    assert_eq!(combined, minimal, "componentwise min of witnesses is not the per-variable minimum");
    assert!(engine.evaluate(&minimal).is_some(), "feasible set is not closed under min");
    for v in 0..minimal.len() {
        let mut lowered = minimal.clone();
        for k in (0..minimal[v]).filter(|&k| base[v][k]) {
            lowered[v] = k;
            assert!(engine.evaluate(&lowered).is_none(), "minimal assignment can be decreased");
        }
    }
    Some(minimal)
}

/// Componentwise-minimal feasible assignment over `sample` with the given
/// lower bounds (as sample indices), or `None` when there is none.
pub fn minimal_feasible_assignment(
    instance: &VcspInstance,
    language: &Language,
    sample: &SampleDomain,
    lower_bounds: &[Option<usize>],
) -> Result<Option<Vec<LaurentNumber>>> {
    if lower_bounds.len() != instance.num_vars {
        return Err(Error::ArityMismatch(format!(
            "{} lower bounds for {} variables",
            lower_bounds.len(),
            instance.num_vars
        )));
    }
    let engine = Engine::new(instance, language, sample, &[])?;
    Ok(minimal_with(&engine, lower_bounds)
        .map(|m| m.iter().map(|&i| sample.elements()[i].clone()).collect()))
}

/// `C_f` over a grid: the minimal set `M`, and a member oracle giving for
/// each `(q, i)` the smallest family set containing it.
pub struct RingFamily {
    engine: Engine,
    sample: SampleDomain,
    n: usize,
    d: usize,
    minimal: RingSet,
    members: RefCell<HashMap<(usize, usize), Option<RingSet>>>,
}

impl RingFamily {
    pub fn universe_size(&self) -> usize {
        self.n * self.d
    }

    pub fn sample(&self) -> &SampleDomain {
        &self.sample
    }

    /// `C_x = {(q, i) | q ≤ x_i}` for an assignment of sample indices.
    pub fn encode(&self, x: &[usize]) -> RingSet {
        let mut s = RingSet::empty(self.universe_size());
        for (i, &xi) in x.iter().enumerate() {
            for q in 0..=xi {
                s.insert(i * self.n + q);
            }
        }
        s
    }

    /// The assignment whose down-set encoding is `s`, when `s` is one.
    pub fn decode(&self, s: &RingSet) -> Option<Vec<usize>> {
        let mut x = Vec::with_capacity(self.d);
        for i in 0..self.d {
            let top = (0..self.n).rev().find(|&q| s.contains_pos(i * self.n + q))?;
            if (0..top).any(|q| !s.contains_pos(i * self.n + q)) {
                return None;
            }
            x.push(top);
        }
        Some(x)
    }

    pub fn minimal_set(&self) -> &RingSet {
        &self.minimal
    }

    /// The smallest family set containing `(q, i)`: the encoding of the
    /// minimal feasible assignment with `x_i ≥ q`.
    pub fn member(&self, q: usize, i: usize) -> Option<RingSet> {
        if let Some(hit) = self.members.borrow().get(&(q, i)) {
            return hit.clone();
        }
        let mut lower = vec![None; self.d];
        lower[i] = Some(q);
        let set = minimal_with(&self.engine, &lower).map(|m| self.encode(&m));
        self.members.borrow_mut().insert((q, i), set.clone());
        set
    }

    /// `M` together with every distinct member-oracle answer.
    pub fn generators(&self) -> Vec<RingSet> {
        let mut out: BTreeSet<RingSet> = BTreeSet::new();
        out.insert(self.minimal.clone());
        for i in 0..self.d {
            for q in 0..self.n {
                if let Some(s) = self.member(q, i) {
                    out.insert(s);
                }
            }
        }
        out.into_iter().collect()
    }

    /// The instance cost at the assignment encoded by `s` (`None` for `+∞`
    /// or for sets that encode no assignment).
    pub fn cost(&self, s: &RingSet) -> Option<LaurentNumber> {
        self.engine.evaluate(&self.decode(s)?)
    }
}

/// Builds `C_f` for the instance over `sample`; `None` when the instance
/// has no feasible assignment there.
pub fn build_ring_family(
    instance: &VcspInstance,
    language: &Language,
    sample: &SampleDomain,
) -> Result<Option<RingFamily>> {
    let engine = Engine::new(instance, language, sample, &[])?;
    let d = instance.num_vars;
    let Some(m) = minimal_with(&engine, &vec![None; d]) else {
        return Ok(None);
    };
    let mut family = RingFamily {
        engine,
        sample: sample.clone(),
        n: sample.len(),
        d,
        minimal: RingSet::empty(0),
        members: RefCell::new(HashMap::new()),
    };
    family.minimal = family.encode(&m);
    Ok(Some(family))
}

/// Exhaustive minimization of `psi` over the closure of the family's
/// generators under union and intersection. `psi` returns `None` for `+∞`.
/// Only additions and comparisons of values are used. Ties go to the set
/// whose assignment is lexicographically smallest.
pub fn sfm_bruteforce<V: CostValue>(
    family: &RingFamily,
    psi: impl Fn(&RingSet) -> Option<V>,
    limits: &Limits,
) -> Result<Option<(RingSet, V)>> {
    let generators = family.generators();
    if generators.len() > limits.max_sfm_generators {
        return Err(Error::ResourceLimit(format!(
            "ring family has {} generators, the exhaustive minimizer accepts {}",
            generators.len(),
            limits.max_sfm_generators
        )));
    }
    let mut closure: BTreeSet<RingSet> = generators.iter().cloned().collect();
    let mut frontier: Vec<RingSet> = generators;
    while let Some(s) = frontier.pop() {
        let current: Vec<RingSet> = closure.iter().cloned().collect();
        for t in &current {
            for u in [s.union(t), s.intersection(t)] {
                if closure.insert(u.clone()) {
                    frontier.push(u);
                }
            }
        }
        if closure.len() as u64 > limits.max_enumeration {
            return Err(Error::ResourceLimit("ring-family closure is too large".into()));
        }
    }
    let mut best: Option<(Vec<usize>, RingSet, V)> = None;
    for s in closure {
        let Some(v) = psi(&s) else { continue };
        let key = family.decode(&s).unwrap_or_default();
        let better = match &best {
            None => true,
            Some((bk, _, bv)) => v < *bv || (v == *bv && key < *bk),
        };
        if better {
            best = Some((key, s, v));
        }
    }
    Ok(best.map(|(_, s, v)| (s, v)))
}
