//! Finite samples `D_{Φ,d}` of the Laurent field that are equisatisfiable
//! with Q for every instance over the atoms `Φ` with at most `d` variables.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::numbers::{rational_pow, LaurentNumber, Rational, SupportWindow};
use crate::syntax::{Atom, PlhCostFunction, Term};

/// A set of normalized, non-trivial atoms, in insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AtomSet {
    atoms: Vec<Atom>,
}

impl AtomSet {
    pub fn new() -> Self {
        AtomSet::default()
    }

    pub fn from_atoms<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> Self {
        let mut set = AtomSet::new();
        set.extend(atoms);
        set
    }

    pub fn of_function(f: &PlhCostFunction) -> Self {
        AtomSet::from_atoms(f.guard_atoms())
    }

    pub fn insert(&mut self, atom: Atom) {
        let atom = atom.normalize();
        if !atom.is_trivial() && !self.atoms.contains(&atom) {
            self.atoms.push(atom);
        }
    }

    pub fn extend<'a>(&mut self, atoms: impl IntoIterator<Item = &'a Atom>) {
        for a in atoms {
            self.insert(a.clone());
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `Φ′`: adds `ε < x`, `x < −ε`, `−ε⁻¹ < x` and `x < ε⁻¹`.
    pub fn with_infinitesimal_bounds(&self) -> AtomSet {
        let eps = LaurentNumber::epsilon();
        let inv = LaurentNumber::monomial(Rational::one(), -1);
        let x = Term::var(0);
        let mut out = self.clone();
        out.insert(Atom::lt(Term::Const(eps.clone()), x.clone()));
        out.insert(Atom::lt(x.clone(), Term::Const(-eps)));
        out.insert(Atom::lt(Term::Const(-inv.clone()), x.clone()));
        out.insert(Atom::lt(x, Term::Const(inv)));
        out
    }
}

/// Which perturbation is applied to `C_{Φ,d}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `x + nxε`, support in `[0, 1]`.
    Csp,
    /// `x + nxε³` over `Φ′`, support in `[−1, 4]`.
    Vcsp,
}

impl Regime {
    pub fn window(self) -> SupportWindow {
        match self {
            Regime::Csp => SupportWindow::CSP,
            Regime::Vcsp => SupportWindow::VCSP,
        }
    }

    fn perturbation_exponent(self) -> i32 {
        match self {
            Regime::Csp => 1,
            Regime::Vcsp => 3,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Csp => "csp",
            Regime::Vcsp => "vcsp",
        })
    }
}

/// A finite, sorted, negation-closed sample containing 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleDomain {
    elements: Vec<LaurentNumber>,
    atoms: AtomSet,
    d: usize,
    regime: Regime,
}

impl SampleDomain {
    pub fn elements(&self) -> &[LaurentNumber] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn atoms(&self) -> &AtomSet {
        &self.atoms
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn index_of(&self, x: &LaurentNumber) -> Option<usize> {
        self.elements.binary_search(x).ok()
    }
}

/// `H(Φ)`: coefficient ratios `c₁/c₂` of two-variable atoms, and `K(Φ)`:
/// constant-over-coefficient ratios of one-variable atoms.
pub fn compute_hk(phi: &AtomSet) -> (BTreeSet<Rational>, BTreeSet<LaurentNumber>) {
    let mut h = BTreeSet::new();
    let mut k = BTreeSet::new();
    for atom in phi.atoms() {
        let Atom::Cmp { lhs, rhs, .. } = atom else { continue };
        match (lhs, rhs) {
            (Term::Scaled { coeff: c1, .. }, Term::Scaled { coeff: c2, .. }) => {
                h.insert(c1 / c2);
            }
            (Term::Scaled { coeff, .. }, Term::Const(c)) | (Term::Const(c), Term::Scaled { coeff, .. }) => {
                k.insert(c.scale(&coeff.recip()));
            }
            (Term::Const(_), Term::Const(_)) => {}
        }
    }
    (h, k)
}

/// Integer vectors of length `len` with `Σ|e_i| < d`.
fn exponent_vectors(len: usize, d: usize) -> Vec<Vec<i32>> {
    fn go(len: usize, budget: i32, prefix: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        for e in -budget..=budget {
            prefix.push(e);
            go(len, budget - e.abs(), prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if d == 0 {
        return out;
    }
    go(len, d as i32 - 1, &mut Vec::new(), &mut out);
    out
}

/// `C_{Φ,d}`: every `|k|·∏|h_i|^{e_i}` with `k ∈ K(Φ) ∪ {1}` and
/// `Σ|e_i| < d`. Ratios with equal absolute value (and `|h| = 1`) give the
/// same products, so they are merged before enumerating exponents.
pub fn compute_c_set(phi: &AtomSet, d: usize) -> BTreeSet<LaurentNumber> {
    let (h, mut k) = compute_hk(phi);
    k.insert(LaurentNumber::one());
    let bases: BTreeSet<Rational> = h
        .iter()
        .map(Signed::abs)
        .filter(|x| !x.is_one() && !x.is_zero())
        .collect();
    let bases: Vec<Rational> = bases.into_iter().collect();
    let factors: Vec<Rational> = exponent_vectors(bases.len(), d)
        .into_iter()
        .map(|e| {
            bases
                .iter()
                .zip(&e)
                .fold(Rational::one(), |acc, (b, x)| acc * rational_pow(b, *x))
        })
        .collect();
    let mut out = BTreeSet::new();
    for kv in &k {
        let abs = kv.abs();
        for f in &factors {
            out.insert(abs.scale(f));
        }
    }
    out
}

/// `C*_{Φ,d}`: each nonzero `x ∈ C` perturbed to `x + n·x·ε^p`, `|n| ≤ d`.
pub fn compute_c_star(c: &BTreeSet<LaurentNumber>, d: usize, regime: Regime) -> BTreeSet<LaurentNumber> {
    let p = regime.perturbation_exponent();
    let mut out = BTreeSet::new();
    for x in c.iter().filter(|x| !x.is_zero()) {
        for n in -(d as i64)..=(d as i64) {
            out.insert(x + &x.shift(p).scale(&Rational::from_integer(n.into())));
        }
    }
    out
}

fn mirror(c_star: BTreeSet<LaurentNumber>) -> Vec<LaurentNumber> {
    let mut elements: Vec<LaurentNumber> = c_star.iter().map(|x| -x).collect();
    elements.push(LaurentNumber::zero());
    elements.extend(c_star);
    elements.sort();
    elements.dedup();
    elements
}

/// `D_{Φ,d} = −C* ∪ {0} ∪ C*` for either regime; in the VCSP regime `Φ` is
/// first extended to `Φ′`.
pub fn build_sample(phi: &AtomSet, d: usize, regime: Regime) -> SampleDomain {
    assert!(d >= 1, "sample parameter d must be positive");
    let atoms = match regime {
        Regime::Csp => phi.clone(),
        Regime::Vcsp => phi.with_infinitesimal_bounds(),
    };
    let c = compute_c_set(&atoms, d);
    let elements = mirror(compute_c_star(&c, d, regime));
    debug_assert!(elements.iter().all(|x| x.fits(regime.window())));
    SampleDomain {
        elements,
        atoms: phi.clone(),
        d,
        regime,
    }
}

pub fn build_csp_sample(phi: &AtomSet, d: usize) -> SampleDomain {
    build_sample(phi, d, Regime::Csp)
}

pub fn build_vcsp_sample(phi: &AtomSet, d: usize) -> SampleDomain {
    build_sample(phi, d, Regime::Vcsp)
}

/// A custom grid (for instance a finite domain) wrapped as a sample. The
/// values are sorted and deduplicated; no closure property is imposed.
pub fn grid_from_values(values: impl IntoIterator<Item = LaurentNumber>, regime: Regime) -> SampleDomain {
    let mut elements: Vec<LaurentNumber> = values.into_iter().collect();
    elements.sort();
    elements.dedup();
    SampleDomain {
        elements,
        atoms: AtomSet::new(),
        d: 1,
        regime,
    }
}
