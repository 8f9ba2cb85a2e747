use std::path::PathBuf;

use plh_cli::run_cli;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["plh"];
    argv.extend_from_slice(args);
    let code = run_cli(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn temp_file(text: &str) -> tempfile::NamedTempFile {
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), text).unwrap();
    f
}

#[test]
fn example_two_minimum_with_threshold_zero() {
    let (lang, inst) = (fixture("lang_example2.plh"), fixture("inst_example2_2.plh"));
    let (code, out, _) = run(&["solve-vcsp", "--language", &lang, "--instance", &inst, "--threshold", "0"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("infimum 0 attained witness x0=0 x1=0 x2=0"));
    assert_eq!(out.lines().nth(1), Some("threshold 0 yes"));
}

#[test]
fn threshold_below_the_minimum_is_no() {
    let (lang, inst) = (fixture("lang_example2.plh"), fixture("inst_example2_2.plh"));
    let (code, out, _) = run(&["solve-vcsp", "--language", &lang, "--instance", &inst, "--threshold", "-1"]);
    assert_eq!(code, 1);
    assert!(out.contains("threshold -1 no"));
}

#[test]
fn example_two_unbounded() {
    let (lang, inst) = (fixture("lang_example2.plh"), fixture("inst_example2_1.plh"));
    let (code, out, _) = run(&["solve-vcsp", "--language", &lang, "--instance", &inst, "--cross-check"]);
    assert_eq!(code, 0);
    assert_eq!(out, "infimum -inf\n");
}

#[test]
fn rationalized_witness_is_printed() {
    let (lang, inst) = (fixture("lang_linear.plh"), fixture("inst_linear.plh"));
    let (code, out, _) = run(&["solve-vcsp", "--language", &lang, "--instance", &inst, "--rationalize", "--threshold", "none"]);
    assert_eq!(code, 0);
    if out.contains(" attained") {
        assert!(out.lines().any(|l| l.starts_with("rational-witness x0=")));
    }
}

#[test]
fn contradictory_csp_is_unsat() {
    let rels = fixture("rels_contradiction.plh");
    let inst = fixture("inst_cycle.plh");
    let (code, out, _) = run(&["solve-csp", "--relations", &rels, "--instance", &inst, "--cross-check"]);
    assert_eq!(code, 1);
    assert_eq!(out, "unsat\n");
}

#[test]
fn satisfiable_csp_prints_a_witness() {
    let rels = fixture("rels_order.plh");
    let inst = fixture("inst_chain.plh");
    let (code, out, _) = run(&["solve-csp", "--relations", &rels, "--instance", &inst, "--witness"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("sat witness x0="));
    assert!(out.contains("rational-witness x0="));
}

#[test]
fn non_max_closed_relations_are_rejected() {
    let rels = fixture("rels_neq.plh");
    let inst = temp_file("(inst (vars 2) (sum (app neq 0 1)))");
    let (code, _, err) = run(&["solve-csp", "--relations", &rels, "--instance", inst.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("not closed under max"), "{err}");
}

#[test]
fn oracle_agrees_on_the_examples() {
    let lang = fixture("lang_example2.plh");
    let (code, out, _) = run(&["oracle", "--language", &lang, "--instance", &fixture("inst_example2_2.plh")]);
    assert_eq!(code, 0);
    assert_eq!(out, "infimum 0 attained\nthreshold 0 yes\n");
    let (_, out, _) = run(&["oracle", "--language", &lang, "--instance", &fixture("inst_example2_1.plh")]);
    assert_eq!(out, "infimum -inf\n");
}

#[test]
fn qe_prints_the_eliminated_formula() {
    let f = temp_file("(exists 2 (and (lt (var 0) (var 2)) (lt (var 2) (var 1))))");
    let (code, out, _) = run(&["qe", "--input", f.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "(lt (var 0) (var 1))");
}

#[test]
fn sample_dump_has_the_documented_size() {
    let f = temp_file("(and (lt (const 1) (var 0)) (lt (var 0) (scale 2 (var 1))))");
    let (code, out, _) = run(&["sample", "--input", f.path().to_str().unwrap(), "--d", "2", "--regime", "csp"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("size 31"));
    assert_eq!(out.lines().count(), 32);
}

#[test]
fn submodularity_check_reports_pass_and_violation() {
    let (code, out, _) = run(&["check-submodular", "--language", &fixture("lang_example1.plh"), "--function", "f"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("pass-on-grid"));
    let (code, out, _) = run(&[
        "check-submodular",
        "--language",
        &fixture("lang_nonsub.plh"),
        "--function",
        "neq",
        "--d",
        "1",
    ]);
    assert_eq!(code, 1);
    assert!(out.starts_with("violation ("));
}

#[test]
fn gadget_output_parses_back() {
    let (code, out, _) = run(&[
        "gadget",
        "--language",
        &fixture("lang_nonsub.plh"),
        "--function",
        "neq",
        "--base",
        &fixture("base_neq_pair.plh"),
    ]);
    assert_eq!(code, 0, "{out}");
    let lang_start = out.find("(lang").unwrap();
    let inst_start = out.find("(inst").unwrap();
    let lang = plh_core::syntax::parse_language(&out[lang_start..inst_start]).unwrap();
    let inst = plh_core::syntax::parse_instance(&out[inst_start..]).unwrap();
    inst.validate_against(&lang).unwrap();
    assert!(inst.summands.iter().filter(|s| s.function == "chi_D").count() == 2);
}

#[test]
fn gadget_accepts_an_explicit_pair() {
    let (code, out, err) = run(&[
        "gadget",
        "--language",
        &fixture("lang_nonsub.plh"),
        "--function",
        "mn",
        "--base",
        &fixture("base_mn_three.plh"),
        "--a",
        "0,2",
        "--b",
        "1,0",
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.starts_with("; violation (0 2) (1 0)\n; domain 0 1 2\n"), "{out}");
    // the table of this base lives on {0, 1, 2}, not on the pair found by search
    let (code, _, err) = run(&[
        "gadget",
        "--language",
        &fixture("lang_nonsub.plh"),
        "--function",
        "mn",
        "--base",
        &fixture("base_mn_three.plh"),
        "--a",
        "0,1",
        "--b",
        "1,0",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("outside the domain"), "{err}");
}

#[test]
fn usage_and_parse_errors_exit_with_two() {
    let (code, _, _) = run(&["solve-vcsp"]);
    assert_eq!(code, 2);
    let bad = temp_file("(lang (def f 1 (piece (var 0) (and (lt (var 0)))))");
    let (code, _, err) = run(&["solve-vcsp", "--language", bad.path().to_str().unwrap(), "--instance", &fixture("inst_open.plh")]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"));
    let (code, _, _) = run(&["qe", "--input", "/nonexistent/file"]);
    assert_eq!(code, 2);
}

#[test]
fn resource_cap_exits_with_three() {
    let (lang, inst) = (fixture("lang_example2.plh"), fixture("inst_example2_2.plh"));
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_plh"))
        .args(["solve-vcsp", "--language", &lang, "--instance", &inst])
        .env("PLH_MAX_DOMAIN", "10")
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&status.stderr).contains("PLH_MAX_DOMAIN"));
}

#[test]
fn output_is_deterministic() {
    let (lang, inst) = (fixture("lang_convex.plh"), fixture("inst_convex.plh"));
    let args = ["solve-vcsp", "--language", &lang, "--instance", &inst, "--witness", "--rationalize"];
    assert_eq!(run(&args), run(&args));
}
