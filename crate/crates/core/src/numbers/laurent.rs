use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::{format_rational, Rational};
use crate::error::{Error, Result};

/// A formal Laurent series `Σ aᵢ εⁱ` with finitely many nonzero rational
/// coefficients, ordered lexicographically from the lowest exponent up
/// (`0 < ε ≪ 1`).
///
/// Terms are stored sorted by exponent with no zero coefficients, so
/// structural equality is numeric equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentNumber {
    terms: Vec<(i32, Rational)>,
}

/// Inclusive exponent range `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SupportWindow {
    pub lo: i32,
    pub hi: i32,
}

impl SupportWindow {
    /// Constants admitted by the extended signature.
    pub const CONSTANTS: SupportWindow = SupportWindow { lo: -1, hi: 1 };
    /// Sample values in the feasibility regime.
    pub const CSP: SupportWindow = SupportWindow { lo: 0, hi: 1 };
    /// Sample values in the optimization regime.
    pub const VCSP: SupportWindow = SupportWindow { lo: -1, hi: 4 };

    pub fn new(lo: i32, hi: i32) -> Self {
        assert!(lo <= hi, "empty support window [{lo}, {hi}]");
        SupportWindow { lo, hi }
    }

    pub fn contains(&self, x: &LaurentNumber) -> bool {
        x.terms.iter().all(|(e, _)| (self.lo..=self.hi).contains(e))
    }

    pub fn width(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }
}

impl LaurentNumber {
    pub fn zero() -> Self {
        LaurentNumber { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(q: Rational) -> Self {
        Self::monomial(q, 0)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(super::rat(n))
    }

    /// `ε` itself.
    pub fn epsilon() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    /// `c · εᵏ`.
    pub fn monomial(coeff: Rational, exponent: i32) -> Self {
        if coeff.is_zero() {
            Self::zero()
        } else {
            LaurentNumber {
                terms: vec![(exponent, coeff)],
            }
        }
    }

    /// Builds a canonical value from arbitrary `(exponent, coefficient)`
    /// pairs; repeated exponents are summed.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i32, Rational)>,
    {
        let mut raw: Vec<(i32, Rational)> = terms.into_iter().collect();
        raw.sort_by_key(|(e, _)| *e);
        let mut out: Vec<(i32, Rational)> = Vec::with_capacity(raw.len());
        for (e, c) in raw {
            match out.last_mut() {
                Some((le, lc)) if *le == e => *lc += c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        LaurentNumber { terms: out }
    }

    pub fn terms(&self) -> &[(i32, Rational)] {
        &self.terms
    }

    pub fn coefficient(&self, exponent: i32) -> Rational {
        self.terms
            .binary_search_by_key(&exponent, |(e, _)| *e)
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the support is contained in `{0}`.
    pub fn is_rational(&self) -> bool {
        self.terms.iter().all(|(e, _)| *e == 0)
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.coefficient(0))
    }

    /// Lowest-exponent term, which decides the sign.
    pub fn leading(&self) -> Option<(i32, &Rational)> {
        self.terms.first().map(|(e, c)| (*e, c))
    }

    pub fn min_exponent(&self) -> Option<i32> {
        self.terms.first().map(|(e, _)| *e)
    }

    pub fn max_exponent(&self) -> Option<i32> {
        self.terms.last().map(|(e, _)| *e)
    }

    pub fn signum(&self) -> Ordering {
        match self.leading() {
            None => Ordering::Equal,
            Some((_, c)) if c.is_positive() => Ordering::Greater,
            Some(_) => Ordering::Less,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn fits(&self, window: SupportWindow) -> bool {
        window.contains(self)
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplication by a rational scalar.
    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        LaurentNumber {
            terms: self.terms.iter().map(|(e, c)| (*e, c * q)).collect(),
        }
    }

    /// Multiplication by `εᵏ`.
    pub fn shift(&self, k: i32) -> Self {
        LaurentNumber {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// Division by the monomial `q · εᵏ`; the only division the toolkit needs.
    ///
    /// Panics if `q` is zero.
    pub fn div_monomial(&self, q: &Rational, k: i32) -> Self {
        assert!(!q.is_zero(), "division by a zero monomial");
        self.scale(&q.recip()).shift(-k)
    }

    /// The exponent-0 coefficient of a value with no negative exponents.
    pub fn standard_part(&self) -> Result<Rational> {
        match self.min_exponent() {
            Some(e) if e < 0 => Err(Error::UnboundedValue(self.to_string())),
            _ => Ok(self.coefficient(0)),
        }
    }

    /// Drops every term with a positive exponent.
    pub fn truncate_infinitesimals(&self) -> Self {
        LaurentNumber {
            terms: self.terms.iter().filter(|(e, _)| *e <= 0).cloned().collect(),
        }
    }

    /// Evaluates the series as a rational function at `ε := eps`.
    pub fn evaluate_at(&self, eps: &Rational) -> Rational {
        self.terms
            .iter()
            .map(|(e, c)| c * super::rational_pow(eps, *e))
            .fold(Rational::zero(), |acc, x| acc + x)
    }

    fn combine(&self, other: &Self, negate_other: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &other.terms;
        let sign = |c: &Rational| if negate_other { -c } else { c.clone() };
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some((ea, ca)), Some((eb, cb))) if ea == eb => {
                    let s = if negate_other { ca - cb } else { ca + cb };
                    if !s.is_zero() {
                        out.push((*ea, s));
                    }
                    i += 1;
                    j += 1;
                }
                (Some((ea, ca)), Some((eb, _))) if ea < eb => {
                    out.push((*ea, ca.clone()));
                    i += 1;
                }
                (Some(_), Some((eb, cb))) => {
                    out.push((*eb, sign(cb)));
                    j += 1;
                }
                (Some((ea, ca)), None) => {
                    out.push((*ea, ca.clone()));
                    i += 1;
                }
                (None, Some((eb, cb))) => {
                    out.push((*eb, sign(cb)));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        LaurentNumber { terms: out }
    }
}

impl Ord for LaurentNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        // First exponent at which the coefficients differ decides.
        let (a, b) = (&self.terms, &other.terms);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some((_, ca)), None) => return ca.cmp(&Rational::zero()),
                (None, Some((_, cb))) => return Rational::zero().cmp(cb),
                (Some((ea, ca)), Some((eb, cb))) => match ea.cmp(eb) {
                    Ordering::Less => return ca.cmp(&Rational::zero()),
                    Ordering::Greater => return Rational::zero().cmp(cb),
                    Ordering::Equal => {
                        let ord = ca.cmp(cb);
                        if ord != Ordering::Equal {
                            return ord;
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for LaurentNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &LaurentNumber {
    type Output = LaurentNumber;
    fn add(self, rhs: &LaurentNumber) -> LaurentNumber {
        self.combine(rhs, false)
    }
}

impl Add for LaurentNumber {
    type Output = LaurentNumber;
    fn add(self, rhs: LaurentNumber) -> LaurentNumber {
        self.combine(&rhs, false)
    }
}

impl AddAssign<&LaurentNumber> for LaurentNumber {
    fn add_assign(&mut self, rhs: &LaurentNumber) {
        *self = self.combine(rhs, false);
    }
}

impl Sub for &LaurentNumber {
    type Output = LaurentNumber;
    fn sub(self, rhs: &LaurentNumber) -> LaurentNumber {
        self.combine(rhs, true)
    }
}

impl Sub for LaurentNumber {
    type Output = LaurentNumber;
    fn sub(self, rhs: LaurentNumber) -> LaurentNumber {
        self.combine(&rhs, true)
    }
}

impl Neg for &LaurentNumber {
    type Output = LaurentNumber;
    fn neg(self) -> LaurentNumber {
        LaurentNumber {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Neg for LaurentNumber {
    type Output = LaurentNumber;
    fn neg(self) -> LaurentNumber {
        -&self
    }
}

impl Mul for &LaurentNumber {
    type Output = LaurentNumber;
    fn mul(self, rhs: &LaurentNumber) -> LaurentNumber {
        let mut acc: Vec<(i32, Rational)> = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                acc.push((ea + eb, ca * cb));
            }
        }
        LaurentNumber::from_terms(acc)
    }
}

impl Mul for LaurentNumber {
    type Output = LaurentNumber;
    fn mul(self, rhs: LaurentNumber) -> LaurentNumber {
        &self * &rhs
    }
}

impl From<Rational> for LaurentNumber {
    fn from(q: Rational) -> Self {
        LaurentNumber::from_rational(q)
    }
}

impl fmt::Display for LaurentNumber {
    /// Rationals print bare (`3`, `-1/2`); anything else as
    /// `(+ (eps -1 2) 3 (eps 3 1/2))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return f.write_str(&format_rational(&self.coefficient(0)));
        }
        f.write_str("(+")?;
        for (e, c) in &self.terms {
            if *e == 0 {
                write!(f, " {}", format_rational(c))?;
            } else {
                write!(f, " (eps {} {})", e, format_rational(c))?;
            }
        }
        f.write_str(")")
    }
}

impl fmt::Debug for LaurentNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
