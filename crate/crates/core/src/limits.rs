//! Resource caps shared by the exhaustive parts of the toolkit.

use crate::error::{Error, Result};

/// Environment variable overriding [`Limits::max_enumeration`].
pub const MAX_DOMAIN_ENV: &str = "PLH_MAX_DOMAIN";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    /// Largest number of points any single enumeration may visit
    /// (relation tuples, sample elements, assignments, grid pairs).
    pub max_enumeration: u64,
    /// Atom count above which quantifier elimination refuses its input.
    pub max_qe_atoms: usize,
    /// Clause count above which DNF conversion gives up.
    pub max_dnf_clauses: usize,
    /// Highest relation arity the CSP solver accepts.
    pub max_relation_arity: usize,
    /// Summand cap of the piece-enumeration oracle.
    pub max_oracle_summands: usize,
    /// Generator cap of the brute-force set-function minimizer.
    pub max_sfm_generators: usize,
    /// Unordered pairs of grid points a submodularity scan may compare.
    pub max_submodularity_pairs: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_enumeration: 20_000_000,
            max_qe_atoms: 64,
            max_dnf_clauses: 4096,
            max_relation_arity: 3,
            max_oracle_summands: 12,
            max_sfm_generators: 20,
            max_submodularity_pairs: 100_000_000,
        }
    }
}

impl Limits {
    /// Defaults, with `PLH_MAX_DOMAIN` overriding the enumeration cap when set.
    pub fn from_env() -> Result<Self> {
        let mut limits = Limits::default();
        if let Ok(raw) = std::env::var(MAX_DOMAIN_ENV) {
            limits.max_enumeration = raw.trim().parse().map_err(|_| {
                Error::Invalid(format!("{MAX_DOMAIN_ENV} must be a positive integer, got `{raw}`"))
            })?;
        }
        Ok(limits)
    }

    /// Fails when `base^exp` points would exceed the enumeration cap.
    pub fn check_enumeration(&self, what: &str, base: usize, exp: usize) -> Result<u64> {
        let mut total: u64 = 1;
        for _ in 0..exp {
            total = total.saturating_mul(base as u64);
        }
        if total > self.max_enumeration {
            return Err(Error::ResourceLimit(format!(
                "{what}: {base}^{exp} points exceed the cap of {} (set {MAX_DOMAIN_ENV} to raise it)",
                self.max_enumeration
            )));
        }
        Ok(total)
    }

    /// Fails when a sample has more elements than the enumeration cap.
    pub fn check_sample_size(&self, len: usize) -> Result<()> {
        if len as u64 > self.max_enumeration {
            return Err(Error::ResourceLimit(format!(
                "the sample has {len} elements, above the cap of {} (set {MAX_DOMAIN_ENV} to raise it)",
                self.max_enumeration
            )));
        }
        Ok(())
    }

    /// Fails when the unordered pairs of `points` points exceed
    /// [`Limits::max_submodularity_pairs`].
    pub fn check_pairs(&self, what: &str, points: u64) -> Result<u64> {
        let pairs = points.saturating_mul(points.saturating_sub(1)) / 2;
        if pairs > self.max_submodularity_pairs {
            return Err(Error::ResourceLimit(format!(
                "{what}: {pairs} pairs of {points} points exceed the cap of {}",
                self.max_submodularity_pairs
            )));
        }
        Ok(pairs)
    }
}
