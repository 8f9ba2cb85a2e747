//! Truth tables of atoms and positive formulas over a finite sample, indexed
//! by element positions.

use crate::numbers::LaurentNumber;
use crate::syntax::{Atom, QfFormula, Term, Var};

/// An atom's truth value for every assignment of sample indices to its (at
/// most two) variables.
#[derive(Clone, Debug)]
pub(crate) struct AtomTable {
    pub vars: Vec<Var>,
    n: usize,
    bits: Vec<bool>,
}

impl AtomTable {
    pub fn build(atom: &Atom, elements: &[LaurentNumber]) -> Self {
        let n = elements.len();
        let Atom::Cmp { lhs, op, rhs } = atom else {
            return AtomTable {
                vars: Vec::new(),
                n,
                bits: vec![*atom == Atom::True],
            };
        };
        let vars = atom.vars();
        let column = |t: &Term| -> Vec<LaurentNumber> {
            match t {
                Term::Scaled { coeff, .. } => elements.iter().map(|e| e.scale(coeff)).collect(),
                Term::Const(k) => vec![k.clone()],
            }
        };
        let (l, r) = (column(lhs), column(rhs));
        let pos = |t: &Term| t.variable().map(|v| vars.iter().position(|w| *w == v).unwrap());
        let (lp, rp) = (pos(lhs), pos(rhs));
        let size = n.pow(vars.len() as u32);
        let mut bits = Vec::with_capacity(size);
        for idx in 0..size {
            let digit = |p: Option<usize>| match p {
                None => 0,
                Some(0) if vars.len() == 2 => idx / n,
                Some(_) => idx % n,
            };
            bits.push(op.holds(l[digit(lp)].cmp(&r[digit(rp)])));
        }
        AtomTable { vars, n, bits }
    }

    /// `value_of(v)` gives the sample index assigned to variable `v`.
    #[inline]
    pub fn holds(&self, value_of: impl Fn(Var) -> usize) -> bool {
        let idx = match self.vars.as_slice() {
            [] => 0,
            [a] => value_of(*a),
            [a, b] => value_of(*a) * self.n + value_of(*b),
            _ => unreachable!("atoms mention at most two variables"),
        };
        self.bits[idx]
    }

    /// Truth value under a partial assignment, `None` while a variable of
    /// the atom is unassigned.
    #[inline]
    pub fn partial(&self, value_of: &impl Fn(Var) -> Option<usize>) -> Option<bool> {
        let idx = match self.vars.as_slice() {
            [] => 0,
            [a] => value_of(*a)?,
            [a, b] => value_of(*a)? * self.n + value_of(*b)?,
            _ => unreachable!("atoms mention at most two variables"),
        };
        Some(self.bits[idx])
    }
}

/// A negation-free formula whose leaves are atom tables.
#[derive(Clone, Debug)]
pub(crate) enum TableFormula {
    Const(bool),
    Atom(usize),
    And(Vec<TableFormula>),
    Or(Vec<TableFormula>),
}

impl TableFormula {
    /// Compiles `f`, appending new atom tables to `tables` (atoms already
    /// present are shared).
    pub fn compile(
        f: &QfFormula,
        elements: &[LaurentNumber],
        atoms: &mut Vec<Atom>,
        tables: &mut Vec<AtomTable>,
    ) -> Self {
        match f {
            QfFormula::Atom(Atom::True) => TableFormula::Const(true),
            QfFormula::Atom(Atom::False) => TableFormula::Const(false),
            QfFormula::Atom(a) => {
                let i = match atoms.iter().position(|b| b == a) {
                    Some(i) => i,
                    None => {
                        atoms.push(a.clone());
                        tables.push(AtomTable::build(a, elements));
                        atoms.len() - 1
                    }
                };
                TableFormula::Atom(i)
            }
            QfFormula::And(fs) => TableFormula::And(
                fs.iter().map(|g| Self::compile(g, elements, atoms, tables)).collect(),
            ),
            QfFormula::Or(fs) => TableFormula::Or(
                fs.iter().map(|g| Self::compile(g, elements, atoms, tables)).collect(),
            ),
            QfFormula::Not(_) => panic!("table formulas must be negation-free"),
        }
    }

    pub fn holds(&self, tables: &[AtomTable], value_of: &impl Fn(Var) -> usize) -> bool {
        match self {
            TableFormula::Const(b) => *b,
            TableFormula::Atom(i) => tables[*i].holds(value_of),
            TableFormula::And(fs) => fs.iter().all(|f| f.holds(tables, value_of)),
            TableFormula::Or(fs) => fs.iter().any(|f| f.holds(tables, value_of)),
        }
    }

    /// Three-valued evaluation: `Some(b)` once the assigned variables decide
    /// the formula.
    pub fn partial(&self, tables: &[AtomTable], value_of: &impl Fn(Var) -> Option<usize>) -> Option<bool> {
        match self {
            TableFormula::Const(b) => Some(*b),
            TableFormula::Atom(i) => tables[*i].partial(value_of),
            TableFormula::And(fs) => {
                let mut known = true;
                for f in fs {
                    match f.partial(tables, value_of) {
                        Some(false) => return Some(false),
                        None => known = false,
                        Some(true) => {}
                    }
                }
                known.then_some(true)
            }
            TableFormula::Or(fs) => {
                let mut known = true;
                for f in fs {
                    match f.partial(tables, value_of) {
                        Some(true) => return Some(true),
                        None => known = false,
                        Some(false) => {}
                    }
                }
                known.then_some(false)
            }
        }
    }
}
