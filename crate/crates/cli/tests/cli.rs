use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn torfan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torfan")).args(args).output().expect("spawn torfan")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = torfan(&all);
    let code = out.status.code().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(text.trim()).unwrap_or(Value::Null);
    (code, v)
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const P2: &str = r#"{"dim": 2, "rays": [[1, 0], [0, 1], [-1, -1]], "max_cones": [[0, 1], [1, 2], [0, 2]]}"#;
const NOT_COMPLETE: &str = r#"{"dim": 2, "rays": [[1, 0], [0, 1], [-1, -1]], "max_cones": [[0, 1], [1, 2]]}"#;

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, v) = json(&["validate", &write(dir.path(), "p2.json", P2)]);
    assert_eq!(code, 0);
    assert_eq!(v["smooth"], true);
    assert_eq!(v["complete"], true);

    let (code, v) = json(&["validate", &write(dir.path(), "half.json", NOT_COMPLETE)]);
    assert_eq!(code, 1);
    assert_eq!(v["complete"], false);

    let bad = write(dir.path(), "bad.json", r#"{"dim": 2, "rays": [[2, 0]], "max_cones": [[0]]}"#);
    let out = torfan(&["validate", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("non-primitive"));

    assert_eq!(torfan(&["validate", "/no/such/file.json"]).status.code(), Some(2));
    assert_eq!(torfan(&["picard", "catalog:nope"]).status.code(), Some(2));
}

#[test]
fn text_and_json_output() {
    let out = torfan(&["picard", "catalog:S3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("picard: 4"));
    let (_, v) = json(&["picard", "catalog:S3"]);
    assert_eq!(v["picard"], 4);
}

#[test]
fn fano_and_projective_queries() {
    let (code, v) = json(&["fano", "catalog:S3"]);
    assert_eq!((code, v["fano"].clone()), (0, Value::Bool(true)));
    let (code, v) = json(&["fano", "catalog:hirzebruch-2"]);
    assert_eq!((code, v["fano"].clone()), (0, Value::Bool(false)));

    let (code, v) = json(&["projective", "catalog:S3"]);
    assert_eq!(code, 0);
    assert_eq!(v["projective"], true);
    assert_eq!(v["verified"], true);
    let (code, v) = json(&["projective", "catalog:nonprojective-3fold"]);
    assert_eq!(code, 0);
    assert_eq!(v["projective"], false);
    assert_eq!(v["verified"], true);
    assert!(v["farkas_multipliers"].is_array());
}

#[test]
fn primitive_collections_and_extremality() {
    let (code, v) = json(&["primcoll", "catalog:P2"]);
    assert_eq!(code, 0);
    let colls = v["collections"].as_array().unwrap();
    assert_eq!(colls.len(), 1);
    assert_eq!(colls[0]["degree"], 3);

    // P1xP1: the class of {x, -x} along the first factor.
    let (_, v) = json(&["catalog", "P1xP1"]);
    let rays = v["fan"]["rays"].as_array().unwrap();
    let n = rays.len();
    let class: Vec<i64> = rays
        .iter()
        .map(|r| i64::from(r == &serde_json::json!([1, 0]) || r == &serde_json::json!([-1, 0])))
        .collect();
    assert_eq!(n, 4);
    let class = serde_json::to_string(&class).unwrap();
    let (code, v) = json(&["extremal", "catalog:P1xP1", "--class", &class]);
    assert_eq!(code, 0);
    assert_eq!(v["extremal"], true);

    let out = torfan(&["extremal", "catalog:P1xP1", "--class", "[1, 2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_requires_fano() {
    let (code, _) = json(&["classify", "catalog:S3", "--ray", "0"]);
    assert_eq!(code, 0);
    assert_eq!(torfan(&["classify", "catalog:hirzebruch-2", "--ray", "0"]).status.code(), Some(2));
}

#[test]
fn basic_construction_writes_steps() {
    let dir = tempfile::tempdir().unwrap();
    let steps = dir.path().join("steps");
    let (code, v) =
        json(&["basic-construction", "catalog:V4", "--ray", "0", "--emit-steps", steps.to_str().unwrap()]);
    assert_eq!(code, 0, "{v}");
    let written = v["written"].as_array().unwrap().len();
    assert!(written >= 2);
    let mut files: Vec<_> = std::fs::read_dir(&steps).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert_eq!(files.len(), written);
    assert!(files[0].ends_with("step-000.json"));
    for f in &files {
        let (code, v) = json(&["validate", f.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert_eq!(v["smooth"], true);
    }
}

#[test]
fn refine_and_factorize() {
    let dir = tempfile::tempdir().unwrap();
    let (code, v) = json(&["refine", "catalog:S1", "catalog:P2"]);
    assert_eq!(code, 0);
    assert_eq!(v["new_rays"].as_array().unwrap().len(), 1);

    let (code, v) = json(&["classify-subdiv", "catalog:subdiv-10", "catalog:P4"]);
    assert_eq!(code, 0);
    assert!(v["cones"].as_array().unwrap().iter().any(|c| c["type_code"] == 10), "{v}");

    let out = dir.path().join("f");
    let (code, v) = json(&["factorize", "catalog:subdiv-15", "catalog:P4", "--emit-steps", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["blow_ups"], 3);
    assert_eq!(std::fs::read_dir(&out).unwrap().count(), 4);

    // Refinement in the wrong direction.
    assert_eq!(torfan(&["refine", "catalog:P2", "catalog:S1"]).status.code(), Some(1));
}

#[test]
fn catalog_listing_and_entries() {
    let (code, v) = json(&["catalog"]);
    assert_eq!(code, 0);
    let names = v["names"].as_array().unwrap();
    assert!(names.iter().any(|n| n == "S3") && names.iter().any(|n| n == "subdiv-17"));
    let (code, v) = json(&["catalog", "F"]);
    assert_eq!(code, 0);
    assert_eq!(v["verified"], true);
    assert_eq!(v["expected"]["picard"], 5);
}

#[test]
fn iso_and_enumerate() {
    let (code, v) = json(&["iso", "catalog:F", "catalog:F-alt"]);
    assert_eq!(code, 0);
    assert_eq!(v["isomorphic"], true);
    assert!(v["witness"].is_array());
    let (_, v) = json(&["iso", "catalog:S2", "catalog:S1"]);
    assert_eq!(v["isomorphic"], false);

    let (code, v) = json(&["enumerate", "--dim", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["count"], 5);
    assert_eq!(torfan(&["enumerate", "--dim", "4"]).status.code(), Some(2));
}

#[test]
fn fvector_report() {
    let (code, v) = json(&["fvector", "catalog:S3xS3xP1"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["ds5"], true);
}

#[test]
fn bulk_check() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.json", P2);
    let (_, v) = json(&["catalog", "S3"]);
    write(dir.path(), "b.json", &v["fan"].to_string());
    write(dir.path(), "notes.txt", "ignored");
    let (code, v) = json(&["bulk-check", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{v}");

    write(dir.path(), "c.json", NOT_COMPLETE);
    let (code, _) = json(&["bulk-check", dir.path().to_str().unwrap()]);
    assert_eq!(code, 1);
}

#[test]
fn usage_errors() {
    assert_eq!(torfan(&[]).status.code(), Some(2));
    assert_eq!(torfan(&["rhodiff", "catalog:S3"]).status.code(), Some(2));
    let (code, v) = json(&["rhodiff", "catalog:S3", "--ray", "0"]);
    assert_eq!(code, 0);
    assert_eq!(v["rho_diff"], 3);
    assert_eq!(torfan(&["rhodiff", "catalog:S3", "--ray", "17"]).status.code(), Some(2));
}
