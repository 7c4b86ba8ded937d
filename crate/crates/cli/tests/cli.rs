use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn extsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_extsym")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn status(r: &Value, name: &str) -> String {
    r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))["status"]
        .as_str()
        .unwrap()
        .to_string()
}

fn names_unique(r: &Value) -> bool {
    let mut names: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    let n = names.len();
    names.sort();
    names.dedup();
    names.len() == n
}

#[test]
fn catalog_listing() {
    let o = extsym(&["catalog"]);
    assert_eq!(code(&o), 0);
    let fams: Vec<String> =
        report(&o)["data"]["entries"].as_array().unwrap().iter().map(|e| e["family"].as_str().unwrap().to_string()).collect();
    assert_eq!(fams, ["tfull-1", "tfull-2a", "tfull-2b", "tfull-3", "tfull-4", "tfull-5"]);

    let o = extsym(&["catalog", "tfull-4"]);
    let es = report(&o)["data"]["entries"].clone();
    assert_eq!(es.as_array().unwrap().len(), 1);
    assert!(es[0]["parameters"].is_array());

    let o = extsym(&["catalog", "tfull-4:k=1,l=0,m=1:c=3/2"]);
    // l* + l, one a3 block and one a4 block
    assert_eq!(report(&o)["data"]["entries"][0]["dim"], 6 + 3 + 4);

    let o = extsym(&["catalog", "no-such-family"]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["data"]["entries"], json!([]));
}

#[test]
fn verify_catalog_entry() {
    let o = extsym(&["verify", "tfull-3"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
    assert!(names_unique(&r));
    assert_eq!(r["tool"], "extsym");
    assert_eq!(r["input"], "tfull-3");
}

#[test]
fn reports_are_byte_identical() {
    let a = extsym(&["verify", "tfull-5:k=1,l=1,m=0:c=-1"]);
    let b = extsym(&["verify", "tfull-5:k=1,l=1,m=0:c=-1"]);
    assert_eq!(a.stdout, b.stdout);
    let a = extsym(&["geomcheck", "item-3", "--seed", "7", "--probes", "5"]);
    let b = extsym(&["geomcheck", "item-3", "--seed", "7", "--probes", "5"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(code(&extsym(&["verify", "tfull-9"])), 2);
    assert_eq!(code(&extsym(&["verify", "/no/such/file.json"])), 2);
    assert_eq!(code(&extsym(&["geomcheck", "item-2", "--at", "1"])), 2);
    assert_eq!(code(&extsym(&["embed", "item-2", "--grid", "0"])), 2);
}

/// `aff(1) + R^2`: the smallest shape where a 3-form can fail to be closed.
fn aff_entry(gamma: Value) -> Value {
    let z = |n: usize| vec![vec!["0"; n]; n];
    let id: Vec<Vec<&str>> = (0..4).map(|i| (0..4).map(|j| if i == j { "1" } else { "0" }).collect()).collect();
    json!({
        "schema": "quadext.v1",
        "l": {"dim": 4, "labels": ["T", "X", "U", "W"], "bracket": [[0, 1, ["0", "1", "0", "0"]]], "D": z(4), "theta": id},
        "a": {"dim": 0, "labels": [], "gram": [], "D": [], "theta": [], "rho": [[], [], [], []]},
        "alpha": [],
        "gamma": gamma,
    })
}

#[test]
fn perturbed_gamma_breaks_jacobi() {
    let dir = tempfile::tempdir().unwrap();
    let clean = dir.path().join("clean.json");
    let bad = dir.path().join("bad.json");
    std::fs::write(&clean, aff_entry(json!([])).to_string()).unwrap();
    std::fs::write(&bad, aff_entry(json!([[1, 2, 3, "1"]])).to_string()).unwrap();
    let r = report(&extsym(&["verify", clean.to_str().unwrap()]));
    assert_eq!(status(&r, "axioms/jacobi"), "pass");
    assert_eq!(status(&r, "quadext/cocycle/d-gamma"), "pass");
    // solvable, not nilpotent: outside the filtration code
    assert_eq!(status(&r, "quadext/balanced"), "unsupported");
    let o = extsym(&["verify", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let r = report(&o);
    assert_eq!(status(&r, "axioms/jacobi"), "fail");
    assert_eq!(status(&r, "quadext/cocycle/d-gamma"), "fail");
}

#[test]
fn catalog_file_round_trip_and_unsupported_algebra_file() {
    let dir = tempfile::tempdir().unwrap();
    let entry = dir.path().join("entry.json");
    let alg = dir.path().join("alg.json");
    let p = |x: &Path| x.to_str().unwrap().to_string();
    assert_eq!(code(&extsym(&["build", "tfull-4:k=0,l=1,m=1:c=1", "--out", &p(&entry)])), 0);
    let o = extsym(&["verify", &p(&entry)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));

    assert_eq!(code(&extsym(&["build", "tfull-2b", "--algebra", "--out", &p(&alg)])), 0);
    let o = extsym(&["verify", &p(&alg)]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(status(&r, "quadext/balanced"), "unsupported");
    assert_eq!(status(&r, "triple/full"), "pass");
}

fn classifier_b(r_dim: usize, bs: Value) -> String {
    json!({"schema": "weakext.v1", "kind": "classifier", "shape": "riemann-B", "r_dim": r_dim,
           "gram": [["-1", "0"], ["0", "1"]], "B": bs})
    .to_string()
}

#[test]
fn extend_diag_one_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ext.json");
    let datum = classifier_b(1, json!([[["1", "0"], ["0", "3"]]]));
    let o = extsym(&["extend", "tfull-1:a0=1", "--datum", &datum, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["data"]["full"], true);
    assert_eq!(r["data"]["decomposability"], "indecomposable");
    // the written algebra passes the suites again
    let again = report(&extsym(&["verify", out.to_str().unwrap()]));
    assert_eq!(status(&again, "axioms/jacobi"), "pass");
    assert_eq!(status(&again, "triple/full"), "pass");
}

#[test]
fn extend_zero_omega_is_not_full() {
    let datum = json!({"schema": "weakext.v1", "kind": "central-extension", "dim": 4, "r_dim": 1, "omega": []}).to_string();
    let o = extsym(&["extend", "tfull-1:a0=1", "--datum", &datum]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["data"]["full"], false);
}

#[test]
fn extend_two_dim_r_may_be_undecided() {
    let datum = classifier_b(2, json!([[["1", "1"], ["1", "0"]], [["0", "1"], ["1", "2"]]]));
    let o = extsym(&["extend", "tfull-1:a0=1", "--datum", &datum]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert!(["undecided", "indecomposable", "decomposable"].contains(&r["data"]["decomposability"].as_str().unwrap()));
}

#[test]
fn extend_rejects_non_invariant_omega() {
    // omega(A1, P1-) without the matching omega(A2, P1+) term is not D-invariant
    let datum = json!({"schema": "weakext.v1", "kind": "central-extension", "dim": 4, "r_dim": 1, "omega": [[0, 3, ["1"]]]}).to_string();
    let o = extsym(&["extend", "tfull-1:a0=1", "--datum", &datum]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn embed_item_two_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pts.csv");
    let o = extsym(&["embed", "item-2:+", "--grid", "11", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('q'))
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 121);
    // columns q0, q1, x1, x2, x3
    assert!(rows.iter().all(|r| r[3] == r[4] * r[4]));

    let json_out = dir.path().join("pts.json");
    assert_eq!(code(&extsym(&["embed", "item-3", "--grid", "3", "--orbit", "--out", json_out.to_str().unwrap()])), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json_out).unwrap()).unwrap();
    assert_eq!(v["schema"], "geom.points.v1");
    assert_eq!(v["rows"].as_array().unwrap().len(), 27);
}

#[test]
fn geomcheck_mean_curvature_and_flatness() {
    let o = extsym(&["geomcheck", "item-4:k=0,l=0,m=1:c=0", "--at", "0.1,0.2,-0.1"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert!((r["data"]["predicted_c"].as_f64().unwrap() + 5.0 / 3.0).abs() < 1e-12);
    assert_eq!(status(&r, "mean-curvature"), "pass");
    assert_eq!(r["tolerances"]["curvature"], 1e-4);

    let o = extsym(&["geomcheck", "item-5", "--seed", "11", "--tolerance-curvature", "1e-5"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(status(&r, "flat"), "pass");
    assert_eq!(r["data"]["expected_flat"], true);
    assert_eq!(r["tolerances"]["curvature"], 1e-5);
}

#[test]
fn report_renders_saved_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    assert_eq!(code(&extsym(&["verify", "tfull-2a", "--out", out.to_str().unwrap()])), 0);
    let o = extsym(&["report", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("PASS") && text.contains("summary:"));
    let o = extsym(&["verify", "tfull-2a", "--format", "text"]);
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("extsym "));
}
