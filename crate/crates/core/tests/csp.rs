mod common;

use common::gen;
use plh_core::csp::{solve_csp, CspOutcome, CspSolver};
use plh_core::numbers::LaurentNumber;
use plh_core::qe::{eliminate_quantifiers, evaluate_qf};
use plh_core::syntax::{QfFormula, RelationSet, VcspInstance};
use plh_core::Limits;
use proptest::prelude::*;

fn quantifier_free(rels: &RelationSet) -> Vec<(String, QfFormula)> {
    rels.relations
        .iter()
        .map(|r| (r.name.clone(), eliminate_quantifiers(&r.formula, &Limits::default()).unwrap()))
        .collect()
}

fn satisfies(defs: &[(String, QfFormula)], inst: &VcspInstance, point: &[LaurentNumber]) -> bool {
    inst.summands.iter().all(|s| {
        let qf = &defs.iter().find(|(n, _)| *n == s.function).unwrap().1;
        let args: Vec<LaurentNumber> = s.args.iter().map(|&v| point[v].clone()).collect();
        evaluate_qf(qf, &args)
    })
}

/// Every sample point satisfying the instance, when there are few enough.
fn sample_solutions(elements: &[LaurentNumber], defs: &[(String, QfFormula)], inst: &VcspInstance) -> Option<Vec<Vec<usize>>> {
    let n = elements.len();
    let total = n.checked_pow(inst.num_vars as u32).filter(|&t| t <= 200_000)?;
    let mut out = Vec::new();
    for mut idx in 0..total {
        let mut p = vec![0; inst.num_vars];
        for slot in p.iter_mut().rev() {
            *slot = idx % n;
            idx /= n;
        }
        let point: Vec<LaurentNumber> = p.iter().map(|&i| elements[i].clone()).collect();
        if satisfies(defs, inst, &point) {
            out.push(p);
        }
    }
    Some(out)
}

#[test]
fn order_fixtures() {
    let rels = common::relations("rels_order.plh");
    let defs = quantifier_free(&rels);
    let solver = CspSolver::new(&rels, &Limits::default()).unwrap();
    let chain = common::instance("inst_chain.plh");
    match solver.solve(&chain).unwrap() {
        CspOutcome::Sat { witness } => assert!(satisfies(&defs, &chain, &witness)),
        CspOutcome::Unsat => panic!("0 < x0 < x1 <= x2 has solutions"),
    }
    assert_eq!(solver.solve(&common::instance("inst_cycle.plh")).unwrap(), CspOutcome::Unsat);
}

#[test]
fn strict_cycle_is_unsat_with_only_lt() {
    let rels = common::relations("rels_contradiction.plh");
    let inst = common::instance("inst_cycle.plh");
    assert_eq!(solve_csp(&inst, &rels, &Limits::default()).unwrap(), CspOutcome::Unsat);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn witness_is_the_greatest_sample_solution(seed in any::<u64>()) {
        let mut r = gen::rng(seed);
        let (rels, inst) = gen::csp_case(&mut r);
        let limits = Limits::default();
        let solver = CspSolver::new(&rels, &limits).unwrap();
        let defs = quantifier_free(&rels);
        let got = solver.solve(&inst).unwrap();
        prop_assert_eq!(got.is_sat(), solver.decide_by_elimination(&inst).unwrap());
        let sample = solver.sample_for(&inst).unwrap();
        let elements = sample.elements();
        if let CspOutcome::Sat { witness } = &got {
            prop_assert!(satisfies(&defs, &inst, witness));
            let rational = solver.rationalize(&inst, witness).unwrap();
            let lifted: Vec<LaurentNumber> = rational.into_iter().map(LaurentNumber::from_rational).collect();
            prop_assert!(satisfies(&defs, &inst, &lifted));
        }
        if let Some(all) = sample_solutions(elements, &defs, &inst) {
            prop_assert_eq!(all.is_empty(), !got.is_sat());
            if let CspOutcome::Sat { witness } = &got {
                let top: Vec<usize> = witness.iter().map(|x| sample.index_of(x).unwrap()).collect();
                prop_assert!(all.contains(&top));
                for p in &all {
                    prop_assert!(p.iter().zip(&top).all(|(a, b)| a <= b));
                }
            }
        }
        prop_assert_eq!(solve_csp(&inst, &rels, &limits).unwrap(), got);
    }
}
