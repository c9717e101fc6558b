use std::io::Write;
use std::process::{Command, Output};

use semipos::matrix::RMatrix;
use semipos::preservers::LinearMap;
use serde_json::{json, Value};
use tempfile::NamedTempFile;

fn file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn semipos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semipos")).args(args).output().unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(f: &NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

#[test]
fn identity_is_semipositive() {
    let a = file("1 0\n0 1\n");
    let out = semipos(&["check", "sp", path(&a)]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_eq!(doc["witness"], json!(["1", "1"]));
    assert_eq!(doc["version"], json!(env!("CARGO_PKG_VERSION")));
}

#[test]
fn opposite_rows_are_not_semipositive() {
    let a = file("1 -1\n-1 1\n");
    let out = semipos(&["check", "sp", path(&a)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["certificate"], json!(["1", "1"]));
}

#[test]
fn msp_check_reports_left_inverse() {
    let a = file("2 -1\n-1 2\n");
    let out = semipos(&["check", "msp", path(&a)]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_eq!(doc["left_inverse"], json!([["2/3", "1/3"], ["1/3", "2/3"]]));
}

#[test]
fn check_over_explicit_cones() {
    let a = file("1 0\n0 1\n");
    let k = file("dim 2\n1 1\n1 -1\n");
    let out = semipos(&["check", "sp", path(&a), "--cone1", path(&k), "--cone2", path(&k)]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn factor_recovers_kronecker_pair() {
    let x = RMatrix::from_i64(&[[1, 2], [0, 1]]);
    let y = RMatrix::from_i64(&[[3, 0], [1, 1]]);
    let l = LinearMap::from_xay(&x, &y).unwrap();
    let f = file(&l.to_text());
    let out = semipos(&["preserver", "factor", path(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let doc = &json_of(&out)["factorization"];
    assert_eq!(doc["kind"], json!("standard"));
    assert_eq!(doc["x"], json!([["1", "2"], ["0", "1"]]));
    assert_eq!(doc["y"], json!([["3", "0"], ["1", "1"]]));
    assert_eq!(doc["sign"], json!(1));
}

#[test]
fn same_seed_gives_identical_bytes() {
    let a = semipos(&["sample", "sp", "3", "2", "--seed", "17"]);
    let b = semipos(&["sample", "sp", "3", "2", "--seed", "17"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let l = file(&LinearMap::transpose_map(2).to_text());
    let a = semipos(&["preserver", "analyze", path(&l), "--seed", "5"]);
    let b = semipos(&["preserver", "analyze", path(&l), "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json_of(&a)["verdict"], json!("counterexample"));
}

#[test]
fn malformed_input_exits_two() {
    let a = file("1 0\n0\n");
    let out = semipos(&["check", "sp", path(&a)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json_of(&out)["error"].as_str().unwrap().contains("line 2"));
    assert!(!out.stderr.is_empty());
}

#[test]
fn missing_file_exits_two() {
    let out = semipos(&["check", "sp", "/nonexistent/matrix.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json_of(&out)["error"].is_string());
}

#[test]
fn pattern_blocks_on_triangular_matrix() {
    let a = file("1 0 0\n1 1 0\n1 1 1\n");
    let out = semipos(&["pattern", "blocks", path(&a)]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    let blocks = doc["blocks"].as_array().unwrap();
    assert_eq!(blocks.len(), 3);
    assert!(blocks.iter().all(|b| b["kind"] == json!("fully indecomposable")));
    assert_eq!(doc["permuted"], json!([["1", "1", "1"], ["0", "1", "1"], ["0", "0", "1"]]));
}

#[test]
fn basis_has_mn_members() {
    let out = semipos(&["basis", "msp", "3", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["basis"].as_array().unwrap().len(), 6);
}
