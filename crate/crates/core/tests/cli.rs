use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use ssvpkit::cli::report::schema;
use ssvpkit::cli::{run, EXIT_FAILURE, EXIT_NEGATIVE, EXIT_OK};
use tempfile::TempDir;

struct Run {
    code: i32,
    out: String,
    err: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.out).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", self.out))
    }
}

fn ssvpkit(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ssvpkit").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn assert_schema(verb: &str, report: &Value) {
    let validator = jsonschema::validator_for(&schema(verb).unwrap()).unwrap();
    let errors: Vec<String> = validator.iter_errors(report).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{verb} report violates its schema: {errors:?}\n{report}");
}

struct Files(TempDir);

impl Files {
    fn new() -> Self {
        Files(tempfile::tempdir().unwrap())
    }

    fn write(&self, name: &str, body: &str) -> String {
        let p: PathBuf = self.0.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.to_str().unwrap().to_owned()
    }

    fn matrix(&self, name: &str, rows: &[&[f64]]) -> String {
        let data: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        let body = serde_json::json!({ "rows": rows.len(), "cols": rows[0].len(), "data": data });
        self.write(name, &body.to_string())
    }
}

const STAIRCASE: &[&[f64]] = &[&[1.0, 1.0, 0.0, 0.0], &[0.0, 1.0, 1.0, 0.0], &[0.0, 0.0, 1.0, 1.0]];
const ZERO_ROW: &[&[f64]] = &[&[1.0, 1.0, 0.0, 0.0], &[0.0, 1.0, 1.0, 0.0], &[0.0, 0.0, 0.0, 0.0]];

#[test]
fn check_reports_pivot_rows() {
    let f = Files::new();
    let a = f.matrix("a.json", STAIRCASE);
    let r = ssvpkit(&["check", "--matrix", &a]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let v = r.json();
    assert_eq!(v["verdict"], "has-SSVP");
    assert_eq!(v["pivot_rows"], serde_json::json!([1, 2, 3, 4, 5, 7]));
    assert_schema("check", &v);
}

#[test]
fn check_negative_verdict_exits_two() {
    let f = Files::new();
    let b = f.matrix("b.json", ZERO_ROW);
    let r = ssvpkit(&["check", "--matrix", &b, "--exact"]);
    assert_eq!(r.code, EXIT_NEGATIVE);
    let v = r.json();
    assert_eq!(v["verdict"], "lacks-SSVP");
    assert_eq!(v["exact"], true);
    assert_eq!(v["residuals"], serde_json::json!([0.0, 0.0, 0.0]));
    assert_schema("check", &v);
}

#[test]
fn certify_accepts_a_violation() {
    let f = Files::new();
    let b = f.matrix("b.json", ZERO_ROW);
    let y = f.matrix("y.json", &[&[0.0; 4], &[0.0; 4], &[1.0, -1.0, 1.0, 0.0]]);
    let r = ssvpkit(&["certify", "--matrix", &b, "--y", &y]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert_eq!(r.json()["valid"], true);
    assert_schema("certify", &r.json());
    let bad = f.matrix("bad.json", &[&[0.0; 4], &[0.0; 4], &[1.0, 1.0, 1.0, 0.0]]);
    let r = ssvpkit(&["certify", "--matrix", &b, "--y", &bad]);
    assert_eq!(r.code, EXIT_NEGATIVE);
    assert_eq!(r.json()["valid"], false);
}

#[test]
fn classify_and_term_rank() {
    let f = Files::new();
    let b = f.matrix("b.json", ZERO_ROW);
    let r = ssvpkit(&["classify", "--matrix", &b]);
    assert_eq!(r.code, EXIT_NEGATIVE);
    assert_eq!(r.json()["rule"], "R2-zero-line");
    assert_schema("classify", &r.json());

    let p = f.write("p.txt", "110\n011\n000\n");
    let r = ssvpkit(&["term-rank", "--pattern", &p]);
    assert_eq!(r.code, EXIT_OK);
    let v = r.json();
    assert_eq!(v["term_rank"], 2);
    assert_eq!(v["full"], false);
    assert_schema("term-rank", &v);
}

#[test]
fn realize_path_family() {
    let r = ssvpkit(&["realize", "--family", "path", "--sigmas", "3,2,1"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let v = r.json();
    assert_eq!(v["matrix"]["rows"], 3);
    assert_eq!(v["matrix"]["cols"], 4);
    assert_eq!(v["pattern_ok"], true);
    assert_schema("realize", &v);
}

#[test]
fn realize_c6_infeasible() {
    let r = ssvpkit(&["realize", "--family", "c6", "--sigmas", "1,1,1"]);
    assert_eq!(r.code, EXIT_NEGATIVE);
    assert_eq!(r.json(), serde_json::json!({ "verdict": "infeasible", "reason": "sigma1 == sigma3" }));
    assert_schema("realize", &r.json());
}

#[test]
fn reordered_sigmas_warn() {
    let r = ssvpkit(&["realize", "--family", "path", "--sigmas", "1,3,2"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.err.contains("reordered"), "{}", r.err);
}

#[test]
fn superpattern_guard_and_success() {
    let f = Files::new();
    let i2 = f.matrix("i2.json", &[&[1.0, 0.0], &[0.0, 1.0]]);
    let p = f.write("p.txt", "11\n01\n");
    let r = ssvpkit(&["superpattern", "--matrix", &i2, "--pattern", &p]);
    assert_eq!(r.code, EXIT_NEGATIVE);
    assert_eq!(r.json()["verdict"], "ssvp-required");
    assert_schema("superpattern", &r.json());

    let a = f.matrix("a.json", &[&[1.0, 0.0, 0.0, 0.0], &[0.0, 2.0, 0.0, 0.0], &[0.0, 0.0, 3.0, 0.0]]);
    let full = f.write("full.txt", "1111\n1111\n1111\n");
    let r = ssvpkit(&["superpattern", "--matrix", &a, "--pattern", &full, "--trace"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert_eq!(r.json()["pattern_ok"], true);
    assert_schema("superpattern", &r.json());
    let first = r.err.lines().next().unwrap();
    let event: Value = serde_json::from_str(first).unwrap();
    assert_eq!(event["iter"], 0);
}

#[test]
fn reports_are_byte_stable() {
    let f = Files::new();
    let a = f.matrix("a.json", &[&[1.0, 0.0, 0.0, 0.0], &[0.0, 2.0, 0.0, 0.0], &[0.0, 0.0, 3.0, 0.0]]);
    let full = f.write("full.txt", "1111\n1111\n1111\n");
    let one = ssvpkit(&["superpattern", "--matrix", &a, "--pattern", &full]);
    let two = ssvpkit(&["superpattern", "--matrix", &a, "--pattern", &full]);
    assert_eq!(one.out, two.out);
}

#[test]
fn bifurcate_and_liberate_and_tangent() {
    let f = Files::new();
    let d = f.matrix("d.json", &[&[2.0, 0.0], &[0.0, 1.0]]);
    let r = ssvpkit(&["bifurcate", "--matrix", &d, "--sigmas", "2.05,0.95"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert_schema("bifurcate", &r.json());

    let zero = f.matrix("zero.json", &[&[0.0, 0.0], &[0.0, 0.0]]);
    let r = ssvpkit(&["liberate", "--matrix", &d, "--direction", &zero]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert_schema("liberate", &r.json());

    let r = ssvpkit(&["tangent", "--matrix", &d]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert_eq!(r.json()["dimension"], 2);
    assert_schema("tangent", &r.json());
}

#[test]
fn usage_and_input_errors_exit_one() {
    assert_eq!(ssvpkit(&["frobnicate"]).code, EXIT_FAILURE);
    assert_eq!(ssvpkit(&["check"]).code, EXIT_FAILURE);
    let r = ssvpkit(&["check", "--matrix", "/nonexistent.json"]);
    assert_eq!(r.code, EXIT_FAILURE);
    assert!(r.err.contains("io error"));
    let f = Files::new();
    let bad = f.write("bad.json", "{\"rows\": 2, \"cols\": 2,\n \"data\": [1, 2, oops]}");
    let r = ssvpkit(&["check", "--matrix", &bad]);
    assert_eq!(r.code, EXIT_FAILURE);
    assert!(r.err.contains("line 2"), "{}", r.err);
    let p = f.write("ragged.txt", "110\n01\n");
    let r = ssvpkit(&["term-rank", "--pattern", &p]);
    assert_eq!(r.code, EXIT_FAILURE);
    assert!(r.err.contains("line 2"), "{}", r.err);
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_ssvpkit");
    let ok = Command::new(exe).args(["realize", "--family", "path", "--sigmas", "2,1"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    let neg = Command::new(exe).args(["realize", "--family", "c6", "--sigmas", "1,1,1"]).output().unwrap();
    assert_eq!(neg.status.code(), Some(EXIT_NEGATIVE));
    let seeded = Command::new(exe)
        .env("SSVPKIT_SEED", "not-a-number")
        .args(["realize", "--family", "c6", "--sigmas", "3,2,1"])
        .output()
        .unwrap();
    assert_eq!(seeded.status.code(), Some(EXIT_FAILURE));
}
