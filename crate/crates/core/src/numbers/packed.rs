use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{LaurentNumber, Rational, SupportWindow};

/// Totally ordered additive values: everything the exhaustive optimizers
/// and the set-function minimizer need from a cost domain.
pub trait CostValue: Clone + Ord + Debug {
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
}

impl CostValue for LaurentNumber {
    fn zero() -> Self {
        LaurentNumber::zero()
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }
}

impl CostValue for Rational {
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }
}

const WIDTH: usize = 6;
const BOUND_BITS: u64 = 96;

/// A Laurent number with support in `[-1, 4]`, stored as integer numerators
/// over a denominator fixed by its [`PackedCodec`]. Derived `Ord` on the
/// array is exactly the lexicographic order of the series.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PackedValue([i128; WIDTH]);

impl CostValue for PackedValue {
    fn zero() -> Self {
        PackedValue([0; WIDTH])
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = [0i128; WIDTH];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.0[i]
                .checked_add(other.0[i])
                .expect("packed cost overflow; codec bound violated");
        }
        PackedValue(out)
    }
}

/// Converts between [`LaurentNumber`] and [`PackedValue`] for one fixed set
/// of values, all sharing a common denominator.
#[derive(Debug, Clone)]
pub struct PackedCodec {
    window: SupportWindow,
    den: BigInt,
}

impl PackedCodec {
    /// Returns `None` when some value leaves the window or the scaled
    /// numerators are too large to sum safely in `i128`.
    pub fn for_values<'a, I>(values: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a LaurentNumber>,
    {
        let window = SupportWindow::VCSP;
        let values: Vec<&LaurentNumber> = values.into_iter().collect();
        let mut den = BigInt::one();
        for v in &values {
            if !v.fits(window) {
                return None;
            }
            for (_, c) in v.terms() {
                den = den.lcm(c.denom());
            }
        }
        let codec = PackedCodec { window, den };
        for v in &values {
            codec.encode(v)?;
        }
        Some(codec)
    }

    pub fn encode(&self, x: &LaurentNumber) -> Option<PackedValue> {
        if !x.fits(self.window) {
            return None;
        }
        let mut out = [0i128; WIDTH];
        for (e, c) in x.terms() {
            let (q, r) = (c.numer() * &self.den).div_rem(c.denom());
            if !r.is_zero() || q.abs().bits() > BOUND_BITS {
                return None;
            }
            out[(e - self.window.lo) as usize] = q.to_i128()?;
        }
        Some(PackedValue(out))
    }

    pub fn decode(&self, p: &PackedValue) -> LaurentNumber {
        LaurentNumber::from_terms(p.0.iter().enumerate().map(|(i, n)| {
            (
                self.window.lo + i as i32,
                Rational::new(BigInt::from(*n), self.den.clone()),
            )
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{rat, ratio};

    #[test]
    fn packed_order_and_sum_match_laurent() {
        let a = LaurentNumber::from_terms([(-1, ratio(1, 3)), (2, rat(5))]);
        let b = LaurentNumber::from_terms([(0, ratio(-7, 2)), (4, ratio(1, 6))]);
        let codec = PackedCodec::for_values([&a, &b]).unwrap();
        let (pa, pb) = (codec.encode(&a).unwrap(), codec.encode(&b).unwrap());
        assert_eq!(pa.cmp(&pb), a.cmp(&b));
        assert_eq!(codec.decode(&pa.add(&pb)), &a + &b);
    }

    #[test]
    fn out_of_window_values_are_refused() {
        let a = LaurentNumber::monomial(rat(1), -2);
        assert!(PackedCodec::for_values([&a]).is_none());
    }
}
