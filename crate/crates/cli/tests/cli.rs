use std::path::Path;
use std::process::{Command, Output};

use opm4::io::{parse_matrix_json, AnyMat};
use opm4::perm::p4;
use opm4::verify::nonclosure_a;
use opm4::{Mat4, Q};
use serde_json::Value;

fn opm4(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opm4")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn exact(o: &Output) -> Mat4<Q> {
    match parse_matrix_json(&stdout(o), true).unwrap() {
        AnyMat::Exact(m) => m,
        AnyMat::Approx(_) => panic!("expected exact entries"),
    }
}

const CONCLUSION: &str = r#"[["10/11","-2/11","-1/11","4/11"],["-2/11","7/11","-2/11","8/11"],
    ["-1/11","-2/11","10/11","4/11"],["4/11","8/11","4/11","-5/11"]]"#;

#[test]
fn gen_grover() {
    let o = opm4(&["gen", "grover"]);
    assert!(o.status.success());
    let g = exact(&o);
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(g[(i, j)], if i == j { Q::new((-1).into(), 2.into()) } else { Q::new(1.into(), 2.into()) });
        }
    }
    assert!(stdout(&o).contains("\"-1/2\""));
}

#[test]
fn gen_x1_matches_the_printed_matrix() {
    let o = opm4(&["gen", "X1", "--x", "2/5", "--z", "4/5"]);
    assert!(o.status.success());
    assert_eq!(exact(&o), nonclosure_a());
    let snapped = opm4(&["gen", "X1", "--x", "0.4", "--z", "0.8"]);
    assert_eq!(exact(&snapped), nonclosure_a());
    let raw = opm4(&["--no-snap", "gen", "X1", "--x", "0.4", "--z", "0.8"]);
    assert!(raw.status.success());
    assert!(matches!(parse_matrix_json(&stdout(&raw), false).unwrap(), AnyMat::Approx(_)));
}

#[test]
fn gen_rejects_points_off_the_conic() {
    let o = opm4(&["gen", "X1", "--x", "1/2", "--z", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1/4"));
    assert_eq!(opm4(&["gen", "X1", "--x", "1/2"]).status.code(), Some(2));
    assert_eq!(opm4(&["gen", "W7"]).status.code(), Some(2));
    assert_eq!(opm4(&["gen", "X1", "--r", "2", "--pbar", "(12)"]).status.code(), Some(2));
}

#[test]
fn gen_other_families() {
    let o = opm4(&["gen", "Y2", "--r", "1/3", "--pbar", "(243)"]);
    assert!(o.status.success());
    assert!(exact(&o).is_permutative() && exact(&o).is_orthogonal());
    let o = opm4(&["gen", "sporadic", "--tau", "(12)", "--sign", "-", "--form", "half-j"]);
    assert!(o.status.success());
    assert!(exact(&o).is_orthogonal());
    let o = opm4(&["gen", "X1theta", "--theta", "0"]);
    let AnyMat::Approx(m) = parse_matrix_json(&stdout(&o), false).unwrap() else { panic!() };
    assert!(m.max_abs_diff(&p4("(13)(24)").to_matrix()) < 1e-15);
    let o = opm4(&["gen", "C2", "--c2", "0.25", "--no-snap"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn classify_examples() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", CONCLUSION);
    let o = opm4(&["classify", &m]);
    assert!(o.status.success());
    assert_eq!(json(&o)["tag"], "irreducible");

    let g = write(dir.path(), "g.json", &stdout(&opm4(&["gen", "grover"])));
    let v = json(&opm4(&["classify", &g]));
    assert_eq!(v["tag"], "permutative");
    assert_eq!(v["witness"]["family"], "X1");

    let j = write(dir.path(), "j.json", "[[1,1,1,1],[1,1,1,1],[1,1,1,1],[1,1,1,1]]");
    assert_eq!(opm4(&["classify", &j]).status.code(), Some(3));
    let bad = write(dir.path(), "bad.json", "[[1,0],[0,1]]");
    assert_eq!(opm4(&["classify", &bad]).status.code(), Some(2));
    assert_eq!(opm4(&["classify", "/nonexistent/m.json"]).status.code(), Some(2));

    let d = write(dir.path(), "d.json", "[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,-1]]");
    assert_eq!(json(&opm4(&["classify", &d]))["tag"], "not-in-span");
    assert_eq!(opm4(&["decompose", &d]).status.code(), Some(3));
}

#[test]
fn decompose_and_partition() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", &stdout(&opm4(&["gen", "grover"])));
    let v = json(&opm4(&["decompose", &g]));
    assert_eq!(v["four_perms"]["coeffs"], serde_json::json!(["-1/2", "1/2", "1/2", "1/2"]));
    let m = write(dir.path(), "m.json", CONCLUSION);
    let v = json(&opm4(&["decompose", &m]));
    assert_eq!(v["membership"], serde_json::json!([1, 2, 5]));
    assert_eq!(v["combination"].as_array().unwrap().len(), 7);
    assert!(v["four_perms"].is_null());

    let classes = json(&opm4(&["partition"]));
    assert_eq!(classes.as_array().unwrap().len(), 6);
    let split = json(&opm4(&["partition", "--matrix", &m]));
    assert!(!split.as_array().unwrap().is_empty());
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn sweep_theta() {
    let o = opm4(&["sweep", "X1theta", "--from", "-pi", "--to", "pi", "--step", "pi/4"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0][0], "parameter");
    assert_eq!(rows[0][17..], ["det", "orth_residual", "permutative"]);
    assert_eq!(rows.len(), 10);
    for r in &rows[1..] {
        assert!((r[17].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
        assert!(r[18].parse::<f64>().unwrap() < 1e-12);
        assert_eq!(r[19], "true");
    }
    let zero = rows.iter().find(|r| r[0] == "0").unwrap();
    let p: Mat4<f64> = p4("(13)(24)").to_matrix();
    for k in 0..16 {
        assert_eq!(zero[k + 1].parse::<f64>().unwrap(), p[(k / 4, k % 4)]);
    }
}

#[test]
fn sweep_rational_rows_recheck() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = opm4(&["sweep", "X1", "--r", "1,2,3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let rows = csv_rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 4);
    for r in &rows[1..] {
        assert!(r[1..17].iter().all(|e| !e.contains('.')));
        let entries: Vec<String> = r[1..17].iter().map(|e| format!("\"{e}\"")).collect();
        let text = format!(
            "[[{}],[{}],[{}],[{}]]",
            entries[0..4].join(","),
            entries[4..8].join(","),
            entries[8..12].join(","),
            entries[12..16].join(",")
        );
        let m = write(dir.path(), "row.json", &text);
        let c = json(&opm4(&["check", &m]));
        assert_eq!(c["permutative"].to_string(), r[19]);
        assert_eq!(c["det"], Value::String(r[17].clone()));
        assert_eq!(c["orthogonality_residual"].as_f64().unwrap(), r[18].parse::<f64>().unwrap());
        assert_eq!(c["orthogonal"], true);
    }
}

#[test]
fn sweep_rejects_bad_input() {
    assert_eq!(opm4(&["sweep", "X1", "--r", ""]).status.code(), Some(2));
    assert_eq!(opm4(&["sweep", "X1", "--r", "0.1234567891"]).status.code(), Some(0));
    assert_eq!(opm4(&["--no-snap", "sweep", "X1", "--r", "0.5"]).status.code(), Some(2));
    let bad = |from: &str, to: &str, step: &str| {
        opm4(&["sweep", "Y1theta", "--from", from, "--to", to, "--step", step]).status.code()
    };
    assert_eq!(bad("0", "1", "0"), Some(2));
    assert_eq!(bad("0", "1", "-0.1"), Some(2));
    assert_eq!(bad("1", "0", "0.1"), Some(2));
    assert_eq!(bad("0", "2pi", "pi"), Some(2));
    assert_eq!(bad("0", "pie", "1"), Some(2));
    assert_eq!(bad("-pi/2", "pi/2", "pi/2"), Some(0));
}

#[test]
fn verify_subsets() {
    let o = opm4(&["verify", "--samples", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS  two-permutations"));
    let o = opm4(&["--seed", "7", "verify", "--chain", "Z", "--samples", "5", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["entries"][0]["passed"], true);
    assert_eq!(opm4(&["verify", "--chain", "W"]).status.code(), Some(2));
    assert_eq!(opm4(&["verify", "--chain", "X", "--samples", "0"]).status.code(), Some(2));
}

#[test]
fn check_reports_flags() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", CONCLUSION);
    let c = json(&opm4(&["check", &m]));
    assert_eq!(c["orthogonal"], true);
    assert_eq!(c["permutative"], false);
    assert_eq!(c["line_sum"], "1");
    assert_eq!(c["strongly_quadrangular"], true);
    let b = write(dir.path(), "b.json", "[[0.5,0.5],[1,2]]");
    assert_eq!(opm4(&["check", &b]).status.code(), Some(2));
}
