use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ricci-stab"))
        .args(args)
        .env_remove("RICCI_STAB_TOL")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    assert_eq!(code(out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn file(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn cert<'a>(v: &'a Value, criterion: &str) -> &'a Value {
    v["certificates"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["criterion"] == criterion)
        .unwrap_or_else(|| panic!("no {criterion} certificate"))
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn validate_nil3_document() {
    let dir = TempDir::new().unwrap();
    let p = file(&dir, "nil3.json", r#"{"dim":3,"brackets":[{"i":1,"j":2,"coeffs":{"3":1.0}}]}"#);
    let v = json(&run(&["validate", &p]));
    assert_eq!(v["valid"], true);
    assert_eq!(v["kind"], "nilpotent, step 2");
    assert_eq!(f(&v["jacobi_defect"]), 0.0);
}

#[test]
fn validate_rejects_broken_jacobi_with_worst_triple() {
    let dir = TempDir::new().unwrap();
    let p = file(
        &dir,
        "bad.json",
        r#"{"dim":3,"brackets":[{"i":1,"j":2,"coeffs":{"2":1}},{"i":1,"j":3,"coeffs":{"3":1}},{"i":2,"j":3,"coeffs":{"1":1}}]}"#,
    );
    let out = run(&["validate", &p]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("(1,2,3)") && err.contains("2.000e0"), "{err}");
}

#[test]
fn validate_exit_codes() {
    let dir = TempDir::new().unwrap();
    let npd = file(&dir, "npd.json", r#"{"dim":2,"brackets":[],"gram":[[1,2],[2,1]]}"#);
    assert_eq!(code(&run(&["validate", &npd])), 1);
    let order = file(&dir, "order.json", r#"{"dim":3,"brackets":[{"i":2,"j":1,"coeffs":{"3":1}}]}"#);
    assert_eq!(code(&run(&["validate", &order])), 1);
    let syntax = file(&dir, "syntax.json", r#"{"dim":3,"brackets":["#);
    assert_eq!(code(&run(&["validate", &syntax])), 2);
    let shape = file(&dir, "shape.json", r#"{"dim":3,"brakets":[]}"#);
    assert_eq!(code(&run(&["validate", &shape])), 2);
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&run(&["validate", missing.to_str().unwrap()])), 2);
}

#[test]
fn stability_nil3_all() {
    let v = json(&run(&["stability", "catalog:nil3", "--criterion", "all"]));
    assert!((f(&v["soliton"]["lambda"]) + 1.5).abs() < 1e-9);
    assert!((f(&v["soliton"]["trace_d"]) - 4.0).abs() < 1e-9);
    assert!((f(&v["max_q"]) - 0.569).abs() < 5e-4);
    assert_eq!(cert(&v, "q")["verdict"], "strict");
    assert_eq!(cert(&v, "two-step")["verdict"], "strict");
    assert_eq!(cert(&v, "sectional")["verdict"], "not_applicable");
    assert_eq!(cert(&v, "einstein")["verdict"], "not_applicable");
}

#[test]
fn stability_abelian_examples() {
    let v = json(&run(&["stability", "catalog:abelian_ex2", "--criterion", "q"]));
    let c = cert(&v, "q");
    assert!(f(&c["lhs"]) >= 18.0 / 107.0);
    assert!((f(&c["rhs"]) - 1.0 / 6.0).abs() < 1e-9);
    assert_eq!(c["verdict"], "inconclusive");

    let v = json(&run(&["stability", "catalog:abelian(3)", "--criterion", "sectional"]));
    assert_eq!(cert(&v, "sectional")["verdict"], "strict");
}

#[test]
fn stability_non_soliton_is_not_fatal() {
    let v = json(&run(&["stability", "catalog:mu11_raw", "--criterion", "q"]));
    assert_eq!(v["soliton"]["is_soliton"], false);
    assert_eq!(cert(&v, "q")["verdict"], "not_applicable");
}

#[test]
fn stability_reads_documents() {
    let dir = TempDir::new().unwrap();
    let emitted = run(&["catalog", "emit", "free2(3)"]);
    assert_eq!(code(&emitted), 0);
    let p = file(&dir, "free.json", std::str::from_utf8(&emitted.stdout).unwrap());
    let v = json(&run(&["stability", &p, "--criterion", "q"]));
    assert!((f(&v["soliton"]["lambda"]) + 2.5).abs() < 1e-9);
    assert!((f(&v["max_q"]) - 0.581).abs() < 5e-4);
}

#[test]
fn extend_einstein() {
    let v = json(&run(&["extend", "catalog:nil3", "--einstein"]));
    assert_eq!(v["dim"], 4);
    assert!((f(&v["max_rho"]) - 1.0).abs() < 5e-4);
    assert_eq!(v["certificate"]["criterion"], "einstein");
    assert_eq!(v["certificate"]["verdict"], "strict");
    assert_eq!(v["algebra"]["dim"], 4);

    let v = json(&run(&["extend", "catalog:abelian(1)", "--einstein"]));
    assert_eq!(v["certificate"]["verdict"], "weak");
}

#[test]
fn extend_with_derivations_gives_nil3_family_member() {
    let dir = TempDir::new().unwrap();
    let t: f64 = 0.3;
    let s = (1.0 - t * t).sqrt();
    let maps = format!("[[[{t},0,0],[0,{s},0],[0,0,{}]]]", t + s);
    let der = file(&dir, "der.json", &maps);
    let out_doc = dir.path().join("ext.json");
    let v = json(&run(&["extend", "catalog:nil3", "--derivations", &der, "--out", out_doc.to_str().unwrap()]));
    assert_eq!(v["soliton"]["is_soliton"], true);
    assert!((f(&v["soliton"]["lambda"]) + 1.5).abs() < 1e-9);
    assert_eq!(v["certificate"]["verdict"], "strict");

    let family = json(&run(&["stability", "catalog:nil3_family(0.3)", "--criterion", "q"]));
    assert!((f(&v["max_q"]) - f(&family["max_q"])).abs() < 1e-9);
    assert!((f(&v["scal"]) - f(&family["scal"])).abs() < 1e-9);

    let written = json(&run(&["validate", out_doc.to_str().unwrap()]));
    assert_eq!(written["dim"], 4);
}

#[test]
fn extend_rejects_non_derivation() {
    let dir = TempDir::new().unwrap();
    let der = file(&dir, "der.json", "[[[1,0,0],[0,0,0],[0,0,0]]]");
    assert_eq!(code(&run(&["extend", "catalog:nil3", "--derivations", &der])), 1);
    assert_ne!(code(&run(&["extend", "catalog:nil3"])), 0);
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn sweep_lauret_curve() {
    let out = run(&["sweep", "lauret_curve", "--range", "0.05:0.95:19"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t,max_eig,threshold,verdict,max_eig_3dp,threshold_3dp\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 19);
    let mut last = f64::NEG_INFINITY;
    for r in &rows {
        let t: f64 = r[0].parse().unwrap();
        assert!(t > last);
        last = t;
        assert!(r[1].parse::<f64>().unwrap() < 2.5);
        assert_eq!(r[3], "strict");
    }
}

#[test]
fn sweep_nil3_family_is_stable_and_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert_eq!(code(&run(&["sweep", "nil3_family", "--range=-0.7:0.7:29", "--out", a.to_str().unwrap()])), 0);
    assert_eq!(
        code(&run(&["--sequential", "sweep", "nil3_family", "--range=-0.7:0.7:29", "--out", b.to_str().unwrap()])),
        0
    );
    let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ta, tb, "parallel and sequential CSV differ");
    let rows = csv_rows(std::str::from_utf8(&ta).unwrap());
    assert_eq!(rows.len(), 29);
    for r in rows {
        assert!(r[1].parse::<f64>().unwrap() < r[2].parse::<f64>().unwrap());
    }
}

#[test]
fn sweep_single_point_and_domain_errors() {
    let out = run(&["sweep", "nil3_family", "--range", "0.5:0.5:1"]);
    assert_eq!(csv_rows(std::str::from_utf8(&out.stdout).unwrap()).len(), 1);
    assert_eq!(code(&run(&["sweep", "lauret_curve", "--range", "0.5:1.5:3"])), 1);
    assert_eq!(code(&run(&["sweep", "nil3_family", "--range", "0.5:0.6"])), 2);
    assert_eq!(code(&run(&["sweep", "diagonal_abelian"])), 1);
}

#[test]
fn sweep_diagonal_abelian() {
    let dir = TempDir::new().unwrap();
    let m = file(&dir, "a.json", "[[[1],[0]],[[0.6,0],[0.8,0],[0,1]]]");
    let out = run(&["sweep", "diagonal_abelian", "--matrices", &m]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], "0");
}

#[test]
fn report_rows_match_reference() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("report.csv");
    let v = json(&run(&["report"]));
    let rows = v.as_array().unwrap();
    assert!(rows.len() >= 10);
    for r in rows {
        assert!(f(&r["max_deviation"]) <= 5e-4, "{}", r["label"]);
    }
    let nil3 = rows.iter().find(|r| r["label"] == "nil3").unwrap();
    assert_eq!(nil3["step"], 2);
    assert_eq!(nil3["q_verdict"], "strict");
    let mu = rows.iter().find(|r| r["label"] == "mu11_diagonalized").unwrap();
    assert_eq!(mu["step"], 4);
    assert_eq!(mu["ext_dim"], 7);

    let out = run(&["report", "--tables", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8(out.stdout).unwrap().contains("mu11_diagonalized"));
    let text = fs::read_to_string(Path::new(&csv)).unwrap();
    assert_eq!(text.lines().count(), rows.len() + 1);
}

#[test]
fn catalog_emit_round_trips() {
    let dir = TempDir::new().unwrap();
    let out = run(&["catalog", "emit", "lauret_curve", "--param", "t=0.5"]);
    assert_eq!(code(&out), 0);
    let p = file(&dir, "lc.json", std::str::from_utf8(&out.stdout).unwrap());
    let v = json(&run(&["validate", &p]));
    assert_eq!(v["dim"], 7);
    assert_eq!(v["structure"]["step"], 6);
    assert_eq!(code(&run(&["catalog", "emit", "lauret_curve", "--param", "t=1.5"])), 1);
    assert_eq!(code(&run(&["catalog", "emit", "no_such_thing"])), 1);
    let list = run(&["catalog", "list"]);
    assert!(String::from_utf8(list.stdout).unwrap().lines().any(|l| l.starts_with("nil3")));
}

#[test]
fn tolerance_env_override_widens_the_band() {
    // nil3 extension: max R̊ = 1 vs −λ = 1.5, inside a 50% band.
    let out = Command::new(env!("CARGO_BIN_EXE_ricci-stab"))
        .args(["extend", "catalog:nil3", "--einstein"])
        .env("RICCI_STAB_TOL", "0.5")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["certificate"]["verdict"], "weak");
}
