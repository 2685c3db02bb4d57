use std::path::Path;
use std::process::Command;

use finmodel::relzoo::{gen, Kind};
use finmodel::structures::build::{complete_graph, cycle_graph, empty_graph, linear_order};
use finmodel_cli::report::{without_timing, Report};
use serde_json::Value;

macro_rules! argv {
    ($($a:expr),* $(,)?) => { vec![$(String::from($a)),*] };
}

const SCHEMA: &str = include_str!("../schema/report.schema.json");

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let mut argv = vec!["finmodel"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = finmodel_cli::run(argv, &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn report(r: &Run) -> Value {
    let v: Value = serde_json::from_str(&r.out).unwrap_or_else(|e| panic!("not a report ({e}): {}{}", r.out, r.err));
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}");
    v
}

fn verdict<'a>(v: &'a Value, name: &str) -> &'a Value {
    &v["verdicts"].as_array().unwrap().iter().find(|x| x["name"] == name).unwrap_or_else(|| panic!("no verdict {name}"))["value"]
}

fn fixtures(dir: &Path) -> impl Fn(&str) -> String + '_ {
    linear_order(2).save(dir.join("lo2.json")).unwrap();
    linear_order(3).save(dir.join("lo3.json")).unwrap();
    linear_order(5).save(dir.join("lo5.json")).unwrap();
    linear_order(6).save(dir.join("lo6.json")).unwrap();
    complete_graph(2).save(dir.join("k2.json")).unwrap();
    cycle_graph(5).save(dir.join("c5.json")).unwrap();
    gen(Kind::Co, 5, 0).unwrap().save(dir.join("co5.json")).unwrap();
    gen(Kind::Og, 6, 2).unwrap().save(dir.join("og6.json")).unwrap();
    gen(Kind::Oc, 4, 1).unwrap().save(dir.join("oc4.json")).unwrap();
    std::fs::write(dir.join("keep_lt.json"), r#"{"keep": ["<"]}"#).unwrap();
    // a cyclically ordered D-relation with one CO triple missing
    let mut bad = gen(Kind::Cod, 6, 3).unwrap().to_json_value();
    bad["relations"]["CO"].as_array_mut().unwrap().remove(0);
    std::fs::write(dir.join("bad.json"), bad.to_string()).unwrap();
    move |name| dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn arrow_on_chains_holds() {
    let dir = tempfile::tempdir().unwrap();
    let p = fixtures(dir.path());
    let r = run(&["arrow", "--C", &p("lo6.json"), "--B", &p("lo3.json"), "--A", &p("lo2.json"), "--k", "2"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(verdict(&report(&r), "arrow"), true);

    let r = run(&["arrow", "--C", &p("lo5.json"), "--B", &p("lo3.json"), "--A", &p("lo2.json"), "--mode", "exhaustive"]);
    assert_eq!(r.code, 0, "a negative verdict is still a computed verdict");
    let v = report(&r);
    assert_eq!(verdict(&v, "arrow"), false);
    assert!(!v["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn broken_axioms_are_a_verdict_not_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = fixtures(dir.path());
    let r = run(&["check-axioms", "--kind", "coD", "--input", &p("bad.json")]);
    assert_eq!(r.code, 0, "{}", r.err);
    let v = report(&r);
    assert_eq!(verdict(&v, "axioms_hold"), false);
    let w = &v["witnesses"].as_array().unwrap()[0];
    assert!(w.to_string().contains('['), "witness carries a tuple: {w}");
}

#[test]
fn exit_codes() {
    let r = run(&["gen", "--kind", "oc", "--size", "-1", "--seed", "0"]);
    assert_eq!(r.code, 1);
    assert!(r.out.is_empty() && !r.err.is_empty(), "errors go to the diagnostic stream");

    let r = run(&["gen", "--kind", "oc", "--size", "5"]);
    assert_eq!(r.code, 1, "an omitted seed is an error");
    assert!(r.err.contains("--seed"));

    assert_eq!(run(&["--help"]).code, 0);
    assert_eq!(run(&["frobnicate"]).code, 1);
    assert_eq!(run(&["check-axioms", "--kind", "lo", "--input", "/nonexistent/x.json"]).code, 1);
}

#[test]
fn exhausted_budgets_exit_2_and_name_the_budget() {
    let dir = tempfile::tempdir().unwrap();
    let p = fixtures(dir.path());
    let r = run(&["arrow", "--C", &p("lo6.json"), "--B", &p("lo3.json"), "--A", &p("lo2.json"), "--mode", "exhaustive", "--budget", "10"]);
    assert_eq!(r.code, 2, "{}", r.out);
    let v = report(&r);
    assert_eq!(verdict(&v, "arrow"), "unknown");
    let note = v["verdicts"][0]["note"].as_str().unwrap_or_default().to_string() + &r.err;
    assert!(note.contains("budget"), "{note}");

    let r = run(&["tww", "--exact", "--max-vertices", "3", "--input", &p("c5.json")]);
    assert_eq!(r.code, 2, "an exact request answered with an upper bound is not a computed verdict");
    assert!(report(&r)["result"]["mode"].to_string().contains("upper"), "{}", r.out);
}

#[test]
fn every_subcommand_emits_a_valid_report() {
    let dir = tempfile::tempdir().unwrap();
    let p = fixtures(dir.path());
    let (left, right) = (dir.path().join("left"), dir.path().join("right"));
    for d in [&left, &right] {
        std::fs::create_dir(d).unwrap();
        empty_graph(2).save(d.join("e2.json")).unwrap();
        complete_graph(2).save(d.join("k2.json")).unwrap();
    }
    let (left, right) = (left.to_string_lossy().into_owned(), right.to_string_lossy().into_owned());
    let table = dir.path().join("table.json").to_string_lossy().into_owned();
    let cases: Vec<Vec<String>> = vec![
        argv!["gen", "--kind", "og", "--size", "7", "--seed", "3"],
        argv!["check-axioms", "--kind", "co", "--input", p("co5.json")],
        argv!["product", "--kind", "full", p("lo3.json"), p("k2.json")],
        argv!["product", "--kind", "lex", p("lo3.json"), p("k2.json")],
        argv!["product", "--kind", "disjoint", p("lo3.json"), p("k2.json")],
        argv!["indisc-scan", "--index", p("oc4.json"), "--reduct", p("keep_lt.json"), "--target", p("og6.json")],
        argv!["indisc-scan", "--index", p("oc4.json"), "--reduct", p("keep_lt.json"), "--target", p("og6.json"), "--mode", "sample", "--samples", "50", "--seed", "1"],
        argv!["reasonable", "--input", p("co5.json")],
        argv!["primitive", "--input", p("c5.json")],
        argv!["ipn", "--input", p("og6.json"), "--relation", "E", "--d", "1"],
        argv!["config-search", "--source", p("lo2.json"), "--target", p("lo5.json")],
        argv!["tww", "--input", p("c5.json")],
        argv!["tww", "--heuristic", "--input", p("c5.json")],
        argv!["tww-transfer", "--left", left.clone(), "--right", right.clone(), "-o", table.clone()],
        argv!["suite", "--only", "3"],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let r = run(&args);
        assert_eq!(r.code, 0, "{args:?}: {}", r.err);
        let v = report(&r);
        assert_eq!(v["command"], args[0]);
        assert!(v["verdicts"].as_array().unwrap().iter().all(|x| !x["scale"].as_str().unwrap().is_empty()));
    }
    let table: Value = serde_json::from_str(&std::fs::read_to_string(&table).unwrap()).unwrap();
    assert_eq!(table["rows"].as_array().unwrap().len(), 6, "rib assignments up to spine automorphism: 3 for each symmetric 2-vertex spine");
}

#[test]
fn tww_reports_width_certificate_and_mode() {
    let dir = tempfile::tempdir().unwrap();
    let p = fixtures(dir.path());
    let v = report(&run(&["tww", "--exact", "--input", &p("c5.json")]));
    assert_eq!(v["result"]["width"], 2);
    assert_eq!(v["result"]["mode"], "exact");
    assert_eq!(v["result"]["certificate"]["merges"].as_array().unwrap().len(), 4);
}

#[test]
fn reports_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = fixtures(dir.path());
    let r = run(&["reasonable", "--input", &p("co5.json")]);
    let parsed: Report = serde_json::from_str(&r.out).unwrap();
    assert_eq!(parsed.to_json(), r.out);
}

#[test]
fn identical_inputs_give_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let p = fixtures(dir.path());
    let args = ["indisc-scan", "--index", &p("oc4.json"), "--reduct", &p("keep_lt.json"), "--target", &p("og6.json"), "--mode", "sample", "--samples", "80", "--seed", "9"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(without_timing(&a.out), without_timing(&b.out));
    let c = run(&[&args[..11], &["--seed", "10"]].concat());
    assert_ne!(report(&a)["config_hash"], report(&c)["config_hash"]);
}

#[test]
fn the_hash_covers_input_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let p = fixtures(dir.path());
    let before = report(&run(&["primitive", "--input", &p("c5.json")]))["config_hash"].clone();
    cycle_graph(5).reduct(&[]).unwrap().save(dir.path().join("c5.json")).unwrap();
    let after = report(&run(&["primitive", "--input", &p("c5.json")]))["config_hash"].clone();
    assert_ne!(before, after);
}

#[test]
fn the_binary_writes_reports_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    let o = Command::new(env!("CARGO_BIN_EXE_finmodel"))
        .args(["gen", "--kind", "lo", "--size", "4", "--seed", "0", "-o"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "gen");
    let s = finmodel::structures::Structure::load(&out).unwrap();
    assert_eq!(s.len(), 4);

    let o = Command::new(env!("CARGO_BIN_EXE_finmodel")).args(["gen", "--kind", "oc", "--size", "-1", "--seed", "0"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
}
