use num_traits::{One, Signed, Zero};

use super::{LaurentNumber, Rational};

/// Picks a positive rational `ε₀` such that substituting `ε := ε₀` keeps the
/// relative order of every pair of `values`.
///
/// For each pair the difference `c_m εᵐ + Σ_{j>m} c_j εʲ` keeps its sign as
/// long as `ε₀ < |c_m| / Σ|c_j|` (and `ε₀ ≤ 1`); the result is half the
/// smallest such radius. The order is then re-checked on every pair, halving
/// further in the (unexpected) event of a failure.
pub fn concretize_epsilon(values: &[LaurentNumber]) -> Rational {
    let mut distinct: Vec<&LaurentNumber> = values.iter().collect();
    distinct.sort();
    distinct.dedup();

    let mut radius = Rational::one();
    for (i, a) in distinct.iter().enumerate() {
        for b in &distinct[i + 1..] {
            let diff = *b - *a;
            let Some((_, lead)) = diff.leading() else { continue };
            let tail: Rational = diff.terms()[1..]
                .iter()
                .map(|(_, c)| c.abs())
                .fold(Rational::zero(), |acc, c| acc + c);
            if !tail.is_zero() {
                let r = lead.abs() / tail;
                if r < radius {
                    radius = r;
                }
            }
        }
    }

    let mut eps = radius / Rational::from_integer(2.into());
    while !order_preserved(&distinct, &eps) {
        eps /= Rational::from_integer(2.into());
    }
    eps
}

fn order_preserved(sorted_distinct: &[&LaurentNumber], eps: &Rational) -> bool {
    let evaluated: Vec<Rational> = sorted_distinct.iter().map(|x| x.evaluate_at(eps)).collect();
    for i in 0..evaluated.len() {
        for j in i + 1..evaluated.len() {
            if evaluated[i] >= evaluated[j] {
                return false;
            }
        }
    }
    true
}
