use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_poscomm"));
    c.env_remove("POSCOMM_MAX_DIM");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SHIFT2: &str = r#"{"kind":"exact","rows":2,"cols":2,"data":[["0","1"],["0","0"]]}"#;

#[test]
fn central_nilpotent_two_by_two() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "c.json", SHIFT2);
    let out = dir.path().join("cert.json");
    let o = run(&["construct", "--method", "central-nilpotent", "--input", s(&input), "--output", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let cert = read_json(&out);
    assert_eq!(cert["a"]["data"], serde_json::json!([["1", "0"], ["0", "0"]]));
    assert_eq!(cert["b"]["data"], serde_json::json!([["0", "1"], ["0", "0"]]));
    assert_eq!(cert["exact"], Value::Bool(true));

    let v = run(&["verify", "--input", s(&out)]);
    assert_eq!(v.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&v.stdout).unwrap();
    assert_eq!(report["ok"], Value::Bool(true));
}

#[test]
fn tampered_certificate_is_rejected() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "c.json", r#"{"kind":"exact","rows":3,"cols":3,"data":[["0","1","0"],["0","0","1"],["0","0","0"]]}"#);
    let out = dir.path().join("cert.json");
    assert!(run(&["construct", "--method", "central-nilpotent", "--input", s(&input), "--output", s(&out)]).status.success());
    let mut cert = read_json(&out);
    cert["a"]["data"][0][1] = Value::String("5".into());
    let bad = write(&dir, "bad.json", &cert.to_string());
    let o = run(&["verify", "--input", s(&bad)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("offending entry (0, 2)"), "{}", stderr(&o));
}

#[test]
fn decompose_reports_bands_and_refuses_cycles() {
    let dir = TempDir::new().unwrap();
    let good = write(&dir, "good.json", r#"{"kind":"exact","rows":3,"cols":3,"data":[["0","1","1"],["0","0","1"],["0","0","0"]]}"#);
    let o = run(&["decompose", "--input", s(&good)]);
    assert!(o.status.success());
    let d: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(d["parts"], serde_json::json!([[0], [1], [2]]));
    assert_eq!(d["nilpotency_index"], 3);

    let bad = write(&dir, "bad.json", r#"{"kind":"exact","rows":2,"cols":2,"data":[["0","1"],["2","0"]]}"#);
    let o = run(&["decompose", "--input", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not nilpotent"));
}

#[test]
fn exit_codes_for_bad_input() {
    let dir = TempDir::new().unwrap();
    let garbage = write(&dir, "g.json", "{not json");
    assert_eq!(run(&["decompose", "--input", s(&garbage)]).status.code(), Some(1));
    assert_eq!(run(&["decompose", "--input", "/nonexistent/c.json"]).status.code(), Some(1));
    assert_eq!(run(&["construct", "--method", "nope", "--input", "x"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    let neg = write(&dir, "neg.json", r#"{"kind":"exact","rows":2,"cols":2,"data":[["0","-1"],["0","0"]]}"#);
    let o = run(&["construct", "--method", "central-nilpotent", "--input", s(&neg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("negative entry"));

    let wide = write(&dir, "w.json", r#"{"kind":"exact","rows":3,"cols":3,"data":[["0","1","0"],["0","0","0"],["0","0","0"]]}"#);
    let o = run(&["construct", "--method", "jordan", "--k", "2", "--input", s(&wide)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("2-super"), "{}", stderr(&o));
}

#[test]
fn max_dim_cap() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "c.json", SHIFT2);
    let o = bin()
        .env("POSCOMM_MAX_DIM", "1")
        .args(["construct", "--method", "central-nilpotent", "--input", s(&input)])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("POSCOMM_MAX_DIM"));
    let o = bin().env("POSCOMM_MAX_DIM", "8").args(["demo", "weighted-shift", "--n", "9"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn every_method_round_trips_through_verify() {
    let dir = TempDir::new().unwrap();
    let c3 = write(&dir, "c3.json", r#"{"kind":"exact","rows":3,"cols":3,"data":[["0","0","4"],["0","0","0"],["0","0","0"]]}"#);
    let weights = write(&dir, "w.json", r#"{"d":["1","2","1/2"]}"#);
    let blocks = write(
        &dir,
        "blocks.json",
        r#"{"partition":{"y_dim":1,"x_dim":2,"count":5,"p":"inf"},
            "blocks":{"0,0":{"kind":"exact","rows":1,"cols":1,"data":[["1/2"]]},
                      "2,1":{"kind":"exact","rows":2,"cols":2,"data":[["1","0"],["2/3","5"]]}}}"#,
    );
    let cases: Vec<Vec<&str>> = vec![
        vec!["--method", "central-nilpotent", "--input", s(&c3)],
        vec!["--method", "jordan", "--k", "2", "--input", s(&c3)],
        vec!["--method", "diagonal-quasi", "--input", s(&c3)],
        vec!["--method", "diagonal-quasi", "--input", s(&c3), "--weights", s(&weights)],
        vec!["--method", "pelczynski", "--input", s(&blocks), "--embedding", "auto", "--eps", "pow2"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let out = dir.path().join(format!("cert{i}.json"));
        let mut full = vec!["construct"];
        full.extend(args.iter().copied());
        full.extend(["--output", s(&out)]);
        let o = run(&full);
        assert_eq!(o.status.code(), Some(0), "case {i}: {}", stderr(&o));
        let v = run(&["verify", "--input", s(&out)]);
        assert_eq!(v.status.code(), Some(0), "case {i}: {}", stderr(&v));
    }
}

#[test]
fn pelczynski_with_explicit_pair() {
    let dir = TempDir::new().unwrap();
    let blocks = write(
        &dir,
        "blocks.json",
        r#"{"partition":{"y_dim":1,"x_dim":2,"count":4,"p":"1"},
            "blocks":{"1,0":{"kind":"exact","rows":2,"cols":1,"data":[["1"],["3"]]}}}"#,
    );
    let pair = write(
        &dir,
        "pair.json",
        r#"{"S":{"kind":"exact","rows":2,"cols":1,"data":[["1/2"],["1/2"]]},
            "T":{"kind":"exact","rows":1,"cols":2,"data":[["1","1"]]}}"#,
    );
    let o = run(&["construct", "--method", "pelczynski", "--input", s(&blocks), "--embedding", s(&pair)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let cert: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cert["method"], "pelczynski");
    assert_eq!(cert["exact"], Value::Bool(true));

    let bad_pair = write(
        &dir,
        "bad.json",
        r#"{"S":{"kind":"exact","rows":2,"cols":1,"data":[["1"],["1"]]},
            "T":{"kind":"exact","rows":1,"cols":2,"data":[["1","1"]]}}"#,
    );
    let o = run(&["construct", "--method", "pelczynski", "--input", s(&blocks), "--embedding", s(&bad_pair)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("TS is not the identity"));
}

#[test]
fn weighted_shift_table() {
    let o = run(&["demo", "weighted-shift", "--weights", "harmonic", "--n", "101"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,sum_w,norm_product,norm_c_inf"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.iter().map(|r| r[0] as usize).collect::<Vec<_>>(), vec![2, 4, 8, 16, 32, 64, 101]);
    let last = rows.last().unwrap();
    assert!((last[1] - 5.1874).abs() < 5e-5);
    assert!(rows.iter().all(|r| r[2] >= r[1] - 1e-9 && r[3] == 1.0));
}

#[test]
fn embed_outputs_pair() {
    let o = run(&["embed", "--n", "2", "--p", "2", "--grid", "4"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["exact"], Value::Bool(false));
    assert_eq!(v["pair"]["S"]["rows"], 4);
    let o = run(&["embed", "--n", "4", "--p", "1", "--grid", "8"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["exact"], Value::Bool(true));
    assert_eq!(run(&["embed", "--n", "3", "--p", "2", "--grid", "8"]).status.code(), Some(2));
    assert_eq!(run(&["embed", "--n", "3", "--p", "x", "--grid", "9"]).status.code(), Some(1));
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = run(&["demo", "random-nilpotent", "--n", "9", "--seed", "42"]);
    let b = run(&["demo", "random-nilpotent", "--n", "9", "--seed", "42"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let input = write(&dir, "c.json", std::str::from_utf8(&a.stdout).unwrap());
    let runs: Vec<Vec<u8>> = (0..2)
        .map(|_| run(&["construct", "--method", "diagonal-quasi", "--input", s(&input)]).stdout)
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert!(!runs[0].is_empty());
}
