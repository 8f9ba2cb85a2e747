//! Exact arithmetic: rationals and finitely supported formal Laurent series
//! in a positive infinitesimal `ε`.

mod concretize;
mod laurent;
mod packed;

pub use concretize::concretize_epsilon;
pub use laurent::{LaurentNumber, SupportWindow};
pub use packed::CostValue;
pub(crate) use packed::{PackedCodec, PackedValue};

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `3`, `-7` or `1/2`. Zero denominators are rejected.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let valid_int = |s: &str, allow_sign: bool| {
        let digits = if allow_sign { s.strip_prefix('-').unwrap_or(s) } else { s };
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid_int(num, true) {
        return None;
    }
    let n: BigInt = num.parse().ok()?;
    match den {
        None => Some(Rational::from_integer(n)),
        Some(d) => {
            if !valid_int(d, false) {
                return None;
            }
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
    }
}

/// `"3"`, `"-1/2"`; the rational's `Display` already has this shape.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

pub(crate) fn rational_pow(base: &Rational, exp: i32) -> Rational {
    let mut acc = Rational::one();
    let factor = if exp >= 0 { base.clone() } else { base.recip() };
    for _ in 0..exp.unsigned_abs() {
        acc *= &factor;
    }
    acc
}
