//! Valued CSPs over submodular PLH languages: sample the domain, search the
//! finite instance exactly, and read off the infimum.

mod ring;
mod search;

pub use ring::{build_ring_family, minimal_feasible_assignment, sfm_bruteforce, RingFamily, RingSet};

use std::fmt;

use num_traits::Signed;

use crate::analysis::{check_submodular, default_grid, Submodularity};
use crate::error::{Error, Result};
use crate::fm::{vcsp_oracle, Infimum};
use crate::limits::Limits;
use crate::numbers::{concretize_epsilon, LaurentNumber, Rational};
use crate::sampler::{build_vcsp_sample, AtomSet, SampleDomain};
use crate::syntax::{Language, Term, Threshold, VcspInstance};

pub(crate) use search::Engine;

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Compare every answer with the piece-enumeration oracle when the
    /// instance is small enough for it.
    pub cross_check: bool,
    /// Check every used function for submodularity on its default grid
    /// before solving.
    pub verify_submodular: bool,
    pub limits: Limits,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            cross_check: true,
            verify_submodular: false,
            limits: Limits::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Infeasible,
    MinusInfinity,
    Finite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub status: Status,
    /// Present when the status is `Finite`.
    pub infimum: Option<LaurentNumber>,
    pub attained: bool,
    /// A minimizing sampled assignment, present iff the infimum is attained.
    pub witness: Option<Vec<LaurentNumber>>,
    /// The witness with `ε` replaced by a small enough rational.
    pub rational_witness: Option<Vec<Rational>>,
}

impl SolveResult {
    pub fn as_infimum(&self) -> Infimum {
        match self.status {
            Status::Infeasible => Infimum::Infeasible,
            Status::MinusInfinity => Infimum::MinusInfinity,
            Status::Finite => Infimum::Value {
                value: self.infimum.clone().expect("finite result carries its infimum"),
                attained: self.attained,
            },
        }
    }
}

impl fmt::Display for SolveResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.status {
            Status::Infeasible => f.write_str("infeasible"),
            Status::MinusInfinity => f.write_str("infimum -inf"),
            Status::Finite => {
                let v = self.infimum.as_ref().unwrap();
                if self.attained {
                    write!(f, "infimum {v} attained")
                } else {
                    write!(f, "infimum {v} not-attained")
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThresholdAnswer {
    Yes { witness: Vec<LaurentNumber> },
    No,
    Infeasible,
}

/// `Φ` = every guard atom of every function the instance uses, sampled at
/// `d = |V_I|`. The threshold plays no part.
pub fn sample_for_instance(instance: &VcspInstance, language: &Language) -> Result<SampleDomain> {
    instance.validate_against(language)?;
    let mut phi = AtomSet::new();
    for name in instance.used_functions() {
        phi.extend(language.require(name)?.guard_atoms());
    }
    Ok(build_vcsp_sample(&phi, instance.num_vars.max(1)))
}

fn check_inputs(instance: &VcspInstance, language: &Language, options: &SolveOptions) -> Result<()> {
    instance.validate_against(language)?;
    for name in instance.used_functions() {
        let f = language.require(name)?;
        if !f.has_rational_constants() {
            let k = f
                .pieces
                .iter()
                .flat_map(|p| {
                    p.guard
                        .iter()
                        .flat_map(|a| a.constants())
                        .chain(p.value.constants())
                })
                .find(|k| !k.is_rational())
                .unwrap();
            return Err(Error::NonRationalConstant(k.to_string()));
        }
        if options.verify_submodular {
            let grid = default_grid(f, &options.limits)?;
            if let Submodularity::Violation(a, b) = check_submodular(f, &grid, &options.limits)? {
                return Err(Error::SubmodularityViolation {
                    function: f.name.clone(),
                    detail: format!("violated at {} and {}", show_point(&a), show_point(&b)),
                });
            }
        }
    }
    Ok(())
}

pub(crate) fn show_point(p: &[LaurentNumber]) -> String {
    let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn oracle_applies(instance: &VcspInstance, options: &SolveOptions) -> bool {
    options.cross_check && instance.summands.len() <= options.limits.max_oracle_summands
}

fn engine_for(
    instance: &VcspInstance,
    language: &Language,
    extra: &[LaurentNumber],
    limits: &Limits,
) -> Result<(Engine, SampleDomain)> {
    let sample = sample_for_instance(instance, language)?;
    limits.check_sample_size(sample.len())?;
    let engine = Engine::new(instance, language, &sample, extra)?;
    Ok((engine, sample))
}

/// Reads the infimum off the minimum `m` over the sample: a negative
/// infinite part means `−∞`, a rational `m` is attained, and otherwise the
/// infimum is the standard part of `m` and is not attained.
fn classify(m: &LaurentNumber) -> (Status, Option<LaurentNumber>, bool) {
    match m.leading() {
        Some((e, c)) if e < 0 && c.is_negative() => (Status::MinusInfinity, None, false),
        _ if m.is_rational() => (Status::Finite, Some(m.clone()), true),
        _ => (
            Status::Finite,
            Some(LaurentNumber::from_rational(m.coefficient(0))),
            false,
        ),
    }
}

/// Minimum, `−∞` or infeasibility of the instance objective, with a
/// witness when the infimum is attained.
pub fn classify_infimum(instance: &VcspInstance, language: &Language, options: &SolveOptions) -> Result<SolveResult> {
    check_inputs(instance, language, options)?;
    let (engine, sample) = engine_for(instance, language, &[], &options.limits)?;
    let result = match engine.minimize(&engine.full_domains()) {
        None => SolveResult {
            status: Status::Infeasible,
            infimum: None,
            attained: false,
            witness: None,
            rational_witness: None,
        },
        Some((assignment, m)) => {
            let (status, infimum, attained) = classify(&m);
            let witness: Option<Vec<LaurentNumber>> =
                attained.then(|| assignment.iter().map(|&i| sample.elements()[i].clone()).collect());
            let rational_witness = match &witness {
                Some(w) => Some(rationalize(instance, language, w, &m)?),
                None => None,
            };
            SolveResult {
                status,
                infimum,
                attained,
                witness,
                rational_witness,
            }
        }
    };
    if oracle_applies(instance, options) {
        let truth = vcsp_oracle(instance, language, &options.limits)?;
        if truth != result.as_infimum() {
            return Err(Error::OracleMismatch(format!(
                "sampling gives {:?}, the oracle gives {truth:?}",
                result.as_infimum()
            )));
        }
    }
    Ok(result)
}

/// Is there an assignment of cost at most the threshold? An infinite or
/// absent threshold asks for feasibility.
pub fn solve_threshold(
    instance: &VcspInstance,
    language: &Language,
    threshold: &Threshold,
    options: &SolveOptions,
) -> Result<ThresholdAnswer> {
    check_inputs(instance, language, options)?;
    let u = match threshold {
        Threshold::Value(q) => Some(LaurentNumber::from_rational(q.clone())),
        Threshold::Absent | Threshold::Infinite => None,
    };
    let extra: Vec<LaurentNumber> = u.iter().cloned().collect();
    let (engine, sample) = engine_for(instance, language, &extra, &options.limits)?;
    let domains = engine.full_domains();
    let found = match &u {
        Some(u) => engine.at_most(u, &domains)?.map(|(a, _)| a),
        None => engine.feasible(&domains),
    };
    let answer = match found {
        Some(a) => ThresholdAnswer::Yes {
            witness: a.iter().map(|&i| sample.elements()[i].clone()).collect(),
        },
        None if engine.feasible(&domains).is_some() => ThresholdAnswer::No,
        None => ThresholdAnswer::Infeasible,
    };
    if let ThresholdAnswer::Yes { witness } = &answer {
        let cost = crate::qe::evaluate_instance(instance, language, witness)?;
        let ok = match (&cost, &u) {
            (Some(c), Some(u)) => c <= u,
            (Some(_), None) => true,
            (None, _) => false,
        };
        if !ok {
            return Err(Error::Invariant("threshold witness does not meet the threshold".into()));
        }
    }
    if oracle_applies(instance, options) {
        let truth = vcsp_oracle(instance, language, &options.limits)?;
        let expected = match (&truth, truth.meets(threshold)) {
            (Infimum::Infeasible, _) => ThresholdAnswer::Infeasible,
            (_, true) => ThresholdAnswer::Yes { witness: Vec::new() },
            (_, false) => ThresholdAnswer::No,
        };
        let same = std::mem::discriminant(&expected) == std::mem::discriminant(&answer);
        if !same {
            return Err(Error::OracleMismatch(format!(
                "threshold answer {answer:?} disagrees with the oracle infimum {truth:?}"
            )));
        }
    }
    Ok(answer)
}

/// Rationalizes a Laurent witness: every term the instance compares or
/// sums is kept in order under the substitution `ε := ε₀`.
pub(crate) fn rationalize(
    instance: &VcspInstance,
    language: &Language,
    witness: &[LaurentNumber],
    cost: &LaurentNumber,
) -> Result<Vec<Rational>> {
    let mut values: Vec<LaurentNumber> = witness.to_vec();
    for s in &instance.summands {
        let f = language.require(&s.function)?;
        let args: Vec<LaurentNumber> = s.args.iter().map(|v| witness[*v].clone()).collect();
        for p in &f.pieces {
            for a in &p.guard {
                if let crate::syntax::Atom::Cmp { lhs, rhs, .. } = a {
                    values.push(lhs.evaluate(&args));
                    values.push(rhs.evaluate(&args));
                }
            }
            if let Term::Const(k) = &p.value {
                values.push(k.clone());
            }
        }
    }
    let eps = concretize_epsilon(&values);
    let out: Vec<Rational> = witness.iter().map(|w| w.evaluate_at(&eps)).collect();
    let lifted: Vec<LaurentNumber> = out.iter().cloned().map(LaurentNumber::from_rational).collect();
    match crate::qe::evaluate_instance(instance, language, &lifted)? {
        Some(c) if c == LaurentNumber::from_rational(cost.evaluate_at(&eps)) => Ok(out),
        other => Err(Error::Invariant(format!(
            "rationalized witness has cost {other:?}, expected {cost} at ε = {eps}"
        ))),
    }
}
