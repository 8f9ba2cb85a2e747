//! The `plh` command line: argument parsing, file loading, and the mapping
//! from results and errors to output lines and exit codes.

use std::fmt::Display;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use plh_core::analysis::{build_hardness_gadget, default_grid, find_violation_witness, rationalize_violation};
use plh_core::csp::{CspOutcome, CspSolver};
use plh_core::fm::{vcsp_oracle, Infimum};
use plh_core::numbers::{parse_rational, LaurentNumber, Rational};
use plh_core::qe::eliminate_quantifiers;
use plh_core::sampler::{build_sample, AtomSet, Regime};
use plh_core::syntax::{
    parse_finite_instance, parse_fo_formula, parse_instance, parse_language, parse_relations, print_instance,
    print_language, Threshold,
};
use plh_core::vcsp::{classify_infimum, solve_threshold, SolveOptions, SolveResult, ThresholdAnswer};
use plh_core::{Error, Limits};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "plh", version, about = "Exact solvers for PLH constraint and valued constraint problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RegimeArg {
    Csp,
    Vcsp,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eliminate the quantifiers of a first-order formula.
    Qe {
        /// File holding one formula in s-expression syntax.
        #[arg(long)]
        input: PathBuf,
    },
    /// Print the sample for the atoms of a formula, relation or language file.
    Sample {
        /// Formula, relation file or language file.
        #[arg(long)]
        input: PathBuf,
        /// Sample parameter (number of variables the sample must serve).
        #[arg(long)]
        d: usize,
        /// Perturbation regime: `csp` (x + nxε) or `vcsp` (x + nxε³ over the ε-extended atoms).
        #[arg(long, value_enum, default_value = "csp")]
        regime: RegimeArg,
    },
    /// Decide a max-closed CSP instance.
    SolveCsp {
        /// Relation file `(rels ...)`.
        #[arg(long)]
        relations: PathBuf,
        /// Instance file `(inst ...)`; its threshold clause is ignored.
        #[arg(long)]
        instance: PathBuf,
        /// Print a satisfying assignment and a rational one.
        #[arg(long)]
        witness: bool,
        /// Also decide the instance by quantifier elimination and compare.
        #[arg(long)]
        cross_check: bool,
    },
    /// Compute the infimum of a submodular VCSP instance.
    SolveVcsp {
        /// Language file `(lang ...)`.
        #[arg(long)]
        language: PathBuf,
        /// Instance file `(inst ...)`.
        #[arg(long)]
        instance: PathBuf,
        /// Overrides the file's threshold: a rational, `inf` or `none`.
        #[arg(long, allow_hyphen_values = true)]
        threshold: Option<String>,
        /// Print the witness of a yes answer to the threshold query.
        #[arg(long)]
        witness: bool,
        /// Print a rational witness for an attained infimum.
        #[arg(long)]
        rationalize: bool,
        /// Compare the result with the piece-enumeration oracle.
        #[arg(long)]
        cross_check: bool,
    },
    /// Compute the infimum with the piece-enumeration oracle.
    Oracle {
        /// Language file `(lang ...)`.
        #[arg(long)]
        language: PathBuf,
        /// Instance file `(inst ...)`.
        #[arg(long)]
        instance: PathBuf,
        /// Overrides the file's threshold: a rational, `inf` or `none`.
        #[arg(long, allow_hyphen_values = true)]
        threshold: Option<String>,
    },
    /// Check submodularity of one function on a grid.
    CheckSubmodular {
        /// Language file `(lang ...)`.
        #[arg(long)]
        language: PathBuf,
        /// Name of the function to check.
        #[arg(long)]
        function: String,
        /// Sample parameter of the grid (default: 2·arity, lowered to fit the pair cap).
        #[arg(long)]
        d: Option<usize>,
    },
    /// Build the hardness instance for a non-submodular function.
    Gadget {
        /// Language file holding the function.
        #[arg(long)]
        language: PathBuf,
        /// Name of a function that is not submodular.
        #[arg(long)]
        function: String,
        /// Finite base instance `(base ...)`.
        #[arg(long)]
        base: PathBuf,
        /// First point of the violating pair, comma-separated rationals
        /// (default: the first violation found on the default grid).
        #[arg(long, allow_hyphen_values = true, requires = "b")]
        a: Option<String>,
        /// Second point of the violating pair.
        #[arg(long, allow_hyphen_values = true, requires = "a")]
        b: Option<String>,
    },
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Run = Result<i32, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn threshold_arg(raw: &Option<String>, from_file: &Threshold) -> Result<Threshold, Failure> {
    match raw.as_deref() {
        None => Ok(from_file.clone()),
        Some("inf") => Ok(Threshold::Infinite),
        Some("none") => Ok(Threshold::Absent),
        Some(q) => parse_rational(q)
            .map(Threshold::Value)
            .ok_or_else(|| Failure::Usage(format!("threshold `{q}` is not a rational number"))),
    }
}

fn assignment<T: Display>(values: &[T]) -> String {
    let parts: Vec<String> = values.iter().enumerate().map(|(i, v)| format!("x{i}={v}")).collect();
    parts.join(" ")
}

fn threshold_text(t: &Threshold) -> String {
    match t {
        Threshold::Value(q) => q.to_string(),
        Threshold::Infinite => "inf".into(),
        Threshold::Absent => "none".into(),
    }
}

fn infimum_line(inf: &Infimum) -> String {
    match inf {
        Infimum::Infeasible => "infeasible".into(),
        Infimum::MinusInfinity => "infimum -inf".into(),
        Infimum::Value { value, attained: true } => format!("infimum {value} attained"),
        Infimum::Value { value, attained: false } => format!("infimum {value} not-attained"),
    }
}

fn qe(out: &mut dyn Write, input: &Path, limits: &Limits) -> Run {
    let f = parse_fo_formula(&read(input)?)?;
    let qf = eliminate_quantifiers(&f, limits)?;
    writeln!(out, "{qf}").ok();
    Ok(EXIT_YES)
}

fn atoms_of_file(text: &str, limits: &Limits) -> Result<AtomSet, Failure> {
    let trimmed = text.trim_start();
    let mut set = AtomSet::new();
    if trimmed.starts_with("(lang") {
        let lang = parse_language(text)?;
        for f in &lang.functions {
            set.extend(f.guard_atoms());
        }
    } else if trimmed.starts_with("(rels") {
        for r in parse_relations(text)?.relations {
            set.extend(eliminate_quantifiers(&r.formula, limits)?.atoms());
        }
    } else {
        set.extend(eliminate_quantifiers(&parse_fo_formula(text)?, limits)?.atoms());
    }
    Ok(set)
}

fn sample(out: &mut dyn Write, input: &Path, d: usize, regime: RegimeArg, limits: &Limits) -> Run {
    if d == 0 {
        return Err(Failure::Usage("--d must be at least 1".into()));
    }
    let phi = atoms_of_file(&read(input)?, limits)?;
    let regime = match regime {
        RegimeArg::Csp => Regime::Csp,
        RegimeArg::Vcsp => Regime::Vcsp,
    };
    if regime == Regime::Csp {
        if let Some(k) = phi.atoms().iter().flat_map(|a| a.constants()).find(|k| !k.is_rational()) {
            return Err(Error::NonRationalConstant(k.to_string()).into());
        }
    }
    let s = build_sample(&phi, d, regime);
    writeln!(out, "size {}", s.len()).ok();
    for x in s.elements() {
        writeln!(out, "{x}").ok();
    }
    Ok(EXIT_YES)
}

fn solve_csp_cmd(out: &mut dyn Write, relations: &Path, instance: &Path, witness: bool, cross: bool, limits: &Limits) -> Run {
    let rels = parse_relations(&read(relations)?)?;
    let inst = parse_instance(&read(instance)?)?;
    let solver = CspSolver::new(&rels, limits)?;
    let outcome = solver.solve(&inst)?;
    if cross {
        let truth = solver.decide_by_elimination(&inst)?;
        if truth != outcome.is_sat() {
            return Err(Error::OracleMismatch(format!(
                "sampling says {}, quantifier elimination says {}",
                outcome.is_sat(),
                truth
            ))
            .into());
        }
    }
    match outcome {
        CspOutcome::Unsat => {
            writeln!(out, "unsat").ok();
            Ok(EXIT_NO)
        }
        CspOutcome::Sat { witness: w } => {
            if witness {
                writeln!(out, "sat witness {}", assignment(&w)).ok();
                let q = solver.rationalize(&inst, &w)?;
                writeln!(out, "rational-witness {}", assignment(&q)).ok();
            } else {
                writeln!(out, "sat").ok();
            }
            Ok(EXIT_YES)
        }
    }
}

fn solve_result_line(r: &SolveResult) -> String {
    let mut line = infimum_line(&r.as_infimum());
    if let Some(w) = &r.witness {
        line.push_str(&format!(" witness {}", assignment(w)));
    }
    line
}

#[allow(clippy::too_many_arguments)]
fn solve_vcsp_cmd(
    out: &mut dyn Write,
    language: &Path,
    instance: &Path,
    threshold: &Option<String>,
    witness: bool,
    rationalize: bool,
    cross: bool,
    limits: &Limits,
) -> Run {
    let lang = parse_language(&read(language)?)?;
    let inst = parse_instance(&read(instance)?)?;
    let threshold = threshold_arg(threshold, &inst.threshold)?;
    let opts = SolveOptions {
        cross_check: cross,
        verify_submodular: false,
        limits: limits.clone(),
    };
    let r = classify_infimum(&inst, &lang, &opts)?;
    writeln!(out, "{}", solve_result_line(&r)).ok();
    if rationalize {
        if let Some(q) = &r.rational_witness {
            writeln!(out, "rational-witness {}", assignment(q)).ok();
        }
    }
    if matches!(threshold, Threshold::Absent) {
        return Ok(if r.as_infimum() == Infimum::Infeasible { EXIT_NO } else { EXIT_YES });
    }
    let answer = solve_threshold(&inst, &lang, &threshold, &opts)?;
    let t = threshold_text(&threshold);
    Ok(match answer {
        ThresholdAnswer::Yes { witness: w } => {
            if witness {
                writeln!(out, "threshold {t} yes witness {}", assignment(&w)).ok();
            } else {
                writeln!(out, "threshold {t} yes").ok();
            }
            EXIT_YES
        }
        ThresholdAnswer::No => {
            writeln!(out, "threshold {t} no").ok();
            EXIT_NO
        }
        ThresholdAnswer::Infeasible => {
            writeln!(out, "threshold {t} infeasible").ok();
            EXIT_NO
        }
    })
}

fn oracle_cmd(out: &mut dyn Write, language: &Path, instance: &Path, threshold: &Option<String>, limits: &Limits) -> Run {
    let lang = parse_language(&read(language)?)?;
    let inst = parse_instance(&read(instance)?)?;
    let threshold = threshold_arg(threshold, &inst.threshold)?;
    let inf = vcsp_oracle(&inst, &lang, limits)?;
    writeln!(out, "{}", infimum_line(&inf)).ok();
    if matches!(threshold, Threshold::Absent) {
        return Ok(if inf == Infimum::Infeasible { EXIT_NO } else { EXIT_YES });
    }
    let yes = inf.meets(&threshold);
    writeln!(out, "threshold {} {}", threshold_text(&threshold), if yes { "yes" } else { "no" }).ok();
    Ok(if yes { EXIT_YES } else { EXIT_NO })
}

fn point(p: &[LaurentNumber]) -> String {
    let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(" "))
}

fn check_submodular_cmd(out: &mut dyn Write, language: &Path, name: &str, d: Option<usize>, limits: &Limits) -> Run {
    let lang = parse_language(&read(language)?)?;
    let f = lang.require(name)?;
    let grid = match d {
        Some(0) => return Err(Failure::Usage("--d must be at least 1".into())),
        Some(d) => build_sample(&AtomSet::of_function(f), d, Regime::Vcsp),
        None => default_grid(f, limits)?,
    };
    match find_violation_witness(f, &grid, limits)? {
        None => {
            writeln!(out, "pass-on-grid {} points", grid.len()).ok();
            Ok(EXIT_YES)
        }
        Some((a, b)) => {
            writeln!(out, "violation {} {}", point(&a), point(&b)).ok();
            Ok(EXIT_NO)
        }
    }
}

fn rational_point(p: &[Rational]) -> String {
    let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(" "))
}

fn rational_list(raw: &str) -> Result<Vec<Rational>, Failure> {
    raw.split(',')
        .map(|x| parse_rational(x.trim()).ok_or_else(|| Failure::Usage(format!("`{x}` is not a rational number"))))
        .collect()
}

fn gadget_cmd(
    out: &mut dyn Write,
    language: &Path,
    name: &str,
    base: &Path,
    pair: Option<(&str, &str)>,
    limits: &Limits,
) -> Run {
    let lang = parse_language(&read(language)?)?;
    let base = parse_finite_instance(&read(base)?)?;
    let f = lang.require(name)?;
    let (qa, qb) = match pair {
        Some((a, b)) => (rational_list(a)?, rational_list(b)?),
        None => {
            let grid = default_grid(f, limits)?;
            let Some((a, b)) = find_violation_witness(f, &grid, limits)? else {
                writeln!(out, "no violation of submodularity on {} grid points", grid.len()).ok();
                return Ok(EXIT_NO);
            };
            let Some(pair) = rationalize_violation(f, &a, &b)? else {
                return Err(
                    Error::Invariant(format!("violation {} {} has no rational instance", point(&a), point(&b))).into(),
                );
            };
            pair
        }
    };
    let g = build_hardness_gadget(f, (&qa, &qb), &base)?;
    let domain: Vec<String> = g.domain.iter().map(|q| q.to_string()).collect();
    writeln!(out, "; violation {} {}", rational_point(&qa), rational_point(&qb)).ok();
    writeln!(out, "; domain {}", domain.join(" ")).ok();
    write!(out, "{}", print_language(&g.language)).ok();
    write!(out, "{}", print_instance(&g.instance)).ok();
    Ok(EXIT_YES)
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Run {
    let limits = Limits::from_env()?;
    match cli.command {
        Command::Qe { input } => qe(out, &input, &limits),
        Command::Sample { input, d, regime } => sample(out, &input, d, regime, &limits),
        Command::SolveCsp {
            relations,
            instance,
            witness,
            cross_check,
        } => solve_csp_cmd(out, &relations, &instance, witness, cross_check, &limits),
        Command::SolveVcsp {
            language,
            instance,
            threshold,
            witness,
            rationalize,
            cross_check,
        } => solve_vcsp_cmd(out, &language, &instance, &threshold, witness, rationalize, cross_check, &limits),
        Command::Oracle {
            language,
            instance,
            threshold,
        } => oracle_cmd(out, &language, &instance, &threshold, &limits),
        Command::CheckSubmodular { language, function, d } => {
            check_submodular_cmd(out, &language, &function, d, &limits)
        }
        Command::Gadget {
            language,
            function,
            base,
            a,
            b,
        } => {
            let pair = a.as_deref().zip(b.as_deref());
            gadget_cmd(out, &language, &function, &base, pair, &limits)
        }
    }
}

fn exit_for(e: &Error) -> i32 {
    if e.is_internal() {
        EXIT_INTERNAL
    } else if matches!(e, Error::ResourceLimit(_)) {
        EXIT_RESOURCE
    } else {
        EXIT_USAGE
    }
}

/// Runs the command line on `args` (including the program name), writing
/// results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_YES };
            if e.use_stderr() {
                write!(err, "{e}").ok();
            } else {
                write!(out, "{e}").ok();
            }
            return code;
        }
    };
    match catch_unwind(AssertUnwindSafe(|| dispatch(cli, out))) {
        Ok(Ok(code)) => code,
        Ok(Err(Failure::Usage(msg))) => {
            writeln!(err, "error: {msg}").ok();
            EXIT_USAGE
        }
        Ok(Err(Failure::Core(e))) => {
            writeln!(err, "error: {e}").ok();
            exit_for(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            writeln!(err, "internal error: {msg}").ok();
            EXIT_INTERNAL
        }
    }
}
