use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use plh_core::analysis::{check_submodular, default_grid};
use plh_core::csp::solve_csp;
use plh_core::fm::vcsp_oracle;
use plh_core::numbers::{ratio, LaurentNumber};
use plh_core::qe::eliminate_quantifiers;
use plh_core::sampler::{build_vcsp_sample, AtomSet};
use plh_core::syntax::{parse_fo_formula, parse_instance, parse_language, parse_relations, Language, VcspInstance};
use plh_core::vcsp::{classify_infimum, SolveOptions};
use plh_core::Limits;

const EXAMPLE1: &str = include_str!("../../core/tests/fixtures/lang_example1.plh");
const EXAMPLE2: &str = include_str!("../../core/tests/fixtures/lang_example2.plh");
const INST2_1: &str = include_str!("../../core/tests/fixtures/inst_example2_1.plh");
const INST2_2: &str = include_str!("../../core/tests/fixtures/inst_example2_2.plh");
const RELS_ORDER: &str = include_str!("../../core/tests/fixtures/rels_order.plh");
const INST_CHAIN: &str = include_str!("../../core/tests/fixtures/inst_chain.plh");

fn example2() -> (Language, VcspInstance, VcspInstance) {
    (
        parse_language(EXAMPLE2).unwrap(),
        parse_instance(INST2_1).unwrap(),
        parse_instance(INST2_2).unwrap(),
    )
}

fn laurent_arithmetic(c: &mut Criterion) {
    let eps = LaurentNumber::epsilon();
    let a = &(&LaurentNumber::from_rational(ratio(3, 2)) + &eps.scale(&ratio(-7, 3))) + &eps.shift(2);
    let b = &LaurentNumber::from_int(-5) + &eps.shift(-1);
    c.bench_function("laurent/mul", |bench| bench.iter(|| black_box(&a) * black_box(&b)));
    c.bench_function("laurent/add", |bench| bench.iter(|| black_box(&a) + black_box(&b)));
    c.bench_function("laurent/cmp", |bench| bench.iter(|| black_box(&a) < black_box(&b)));
}

fn sampling(c: &mut Criterion) {
    let lang = parse_language(EXAMPLE1).unwrap();
    let phi = AtomSet::from_atoms(lang.functions.iter().flat_map(|f| f.guard_atoms()));
    let mut group = c.benchmark_group("sample/vcsp");
    for d in 1..=4 {
        group.bench_with_input(BenchmarkId::from_parameter(d), &d, |bench, &d| {
            bench.iter(|| build_vcsp_sample(black_box(&phi), d).len())
        });
    }
    group.finish();
}

fn elimination(c: &mut Criterion) {
    let f = parse_fo_formula(
        "(exists 2 (exists 3 (and (lt (var 0) (scale 2 (var 2))) (lt (var 2) (var 3)) \
         (or (lt (var 3) (var 1)) (eq (var 3) (scale 1/2 (var 1)))) (lt (const -1) (var 2)))))",
    )
    .unwrap();
    let limits = Limits::default();
    c.bench_function("qe/two_blocks", |bench| {
        bench.iter(|| eliminate_quantifiers(black_box(&f), &limits).unwrap())
    });
}

fn vcsp(c: &mut Criterion) {
    let (lang, unbounded, bounded) = example2();
    let limits = Limits::default();
    let opts = SolveOptions {
        cross_check: false,
        ..SolveOptions::default()
    };
    c.bench_function("vcsp/sample_minimum_unbounded", |bench| {
        bench.iter(|| classify_infimum(black_box(&unbounded), &lang, &opts).unwrap())
    });
    c.bench_function("vcsp/sample_minimum_bounded", |bench| {
        bench.iter(|| classify_infimum(black_box(&bounded), &lang, &opts).unwrap())
    });
    c.bench_function("vcsp/fm_oracle_bounded", |bench| {
        bench.iter(|| vcsp_oracle(black_box(&bounded), &lang, &limits).unwrap())
    });
}

fn csp(c: &mut Criterion) {
    let rels = parse_relations(RELS_ORDER).unwrap();
    let inst = parse_instance(INST_CHAIN).unwrap();
    let limits = Limits::default();
    c.bench_function("csp/chain", |bench| {
        bench.iter(|| solve_csp(black_box(&inst), &rels, &limits).unwrap())
    });
}

fn submodularity(c: &mut Criterion) {
    let lang = parse_language(EXAMPLE1).unwrap();
    let f = &lang.functions[0];
    let limits = Limits::default();
    let grid = default_grid(f, &limits).unwrap();
    c.bench_function("analysis/check_submodular_example1", |bench| {
        bench.iter(|| check_submodular(black_box(f), &grid, &limits).unwrap())
    });
}

criterion_group!(benches, laurent_arithmetic, sampling, elimination, vcsp, csp, submodularity);
criterion_main!(benches);
