use std::path::Path;
use std::process::{Command, Output};

use pencil_cli::commands::{cmd_analyze, cmd_generate, AnalyzeArgs, GenerateArgs, Source};
use pencil_cli::document::PencilDocument;
use rand::{Rng, SeedableRng};
use serde_json::Value;

fn pencil(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pencil")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn ints(v: &Value) -> Vec<u64> {
    v.as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const ALL_LAMBDA: &str = r#"{"m":2,"n":2,
  "A":[[[0,0],[0,0]],[[0,0],[0,0]]],
  "E":[[[1,0],[1,0]],[[1,0],[1,0]]]}"#;

#[test]
fn all_lambda_pencil_report() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p.json", ALL_LAMBDA);
    let r = json(&pencil(&["analyze", &f, "--verify"]));
    assert_eq!(ints(&r["indices"]["right_minimal"]), vec![0]);
    assert_eq!(ints(&r["indices"]["partial_multiplicities"]), vec![1]);
    assert_eq!(ints(&r["indices"]["left_minimal"]), vec![0]);
    assert_eq!(r["toeplitz"]["agrees"], Value::Bool(true));
    assert_eq!(r["variable"], "lambda-lambda0");
}

#[test]
fn identity_pencil_has_empty_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "id.json", r#"{"m":2,"n":2,"A":[[[1,0],[0,0]],[[0,0],[1,0]]],"E":[[[0,0],[0,0]],[[0,0],[0,0]]]}"#);
    let out = pencil(&["analyze", &f]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!(r["root_polynomials"].as_array().unwrap().is_empty());
    assert!(r["minimal_basis"]["degrees"].as_array().unwrap().is_empty());
}

#[test]
fn generate_then_analyze_matlabex() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("mx.json");
    let f = f.to_str().unwrap();
    let gen = pencil(&["generate", "--s", "4,2,0", "--t", "5,3,1", "--seed", "11", "--disguise", "--fill", "complex", "-o", f]);
    assert!(gen.status.success());
    let r = json(&pencil(&["analyze", f]));
    assert_eq!(ints(&r["indices"]["right_minimal"]), vec![0, 1, 2]);
    assert_eq!(ints(&r["indices"]["partial_multiplicities"]), vec![1, 2]);
    assert_eq!(ints(&r["red"]["t"]), vec![3, 2, 1]);
    assert_eq!(ints(&r["blue"]["s"]), vec![2, 1, 0]);
    let orders: Vec<u64> = r["root_polynomials"].as_array().unwrap().iter().map(|x| x["order"].as_u64().unwrap()).collect();
    assert_eq!(orders, vec![2, 1]);
}

#[test]
fn planted_point_is_picked_up_from_document() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("shifted.json");
    let f = f.to_str().unwrap();
    assert!(pencil(&["generate", "--s", "2,1", "--t", "3,2", "--lambda0", "-0.5+2i", "--disguise", "-o", f]).status.success());
    let r = json(&pencil(&["analyze", f, "--expand-monomial"]));
    assert_eq!(r["lambda0"], "-0.5+2i");
    assert_eq!(r["variable"], "lambda");
    assert_eq!(ints(&r["indices"]["partial_multiplicities"]), vec![2]);
    // explicit flag wins over the document
    let r0 = json(&pencil(&["analyze", f, "--lambda0", "0"]));
    assert!(ints(&r0["indices"]["partial_multiplicities"]).is_empty());
}

#[test]
fn matrix_market_pair() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.mtx", "%%MatrixMarket matrix coordinate real general\n1 2 1\n1 2 1.0\n");
    let e = write(dir.path(), "e.mtx", "%%MatrixMarket matrix array complex general\n1 2\n1 0\n0 0\n");
    // [λ 1]: one right minimal index equal to 1
    let r = json(&pencil(&["analyze", "--A", &a, "--E", &e]));
    assert_eq!(ints(&r["indices"]["right_minimal"]), vec![1]);
    assert_eq!(ints(&r["staircase"]["t"]), vec![1, 1]);
}

#[test]
fn user_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad_shape = write(dir.path(), "bad.json", r#"{"m":2,"n":2,"A":[[[0,0]]],"E":[]}"#);
    let garbage = write(dir.path(), "garbage.json", "not json");
    let a = write(dir.path(), "a.mtx", "%%MatrixMarket matrix array real general\n2 1\n1\n2\n");
    let e = write(dir.path(), "e.mtx", "%%MatrixMarket matrix array real general\n1 2\n1\n2\n");
    let nan = write(dir.path(), "n.mtx", "%%MatrixMarket matrix array real general\n1 2\nnan\n2\n");
    for args in [
        vec!["analyze", bad_shape.as_str()],
        vec!["analyze", garbage.as_str()],
        vec!["analyze", "/nonexistent/file.json"],
        vec!["analyze", "--A", a.as_str(), "--E", e.as_str()],
        vec!["analyze", "--A", nan.as_str(), "--E", nan.as_str()],
        vec!["analyze", bad_shape.as_str(), "--lambda0", "x"],
        vec!["generate", "--s", "3", "--t", "2"],
        vec!["generate", "--t", "2", "--fill", "uniform"],
        vec!["frobnicate"],
    ] {
        let out = pencil(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn table1_csv() {
    let out = pencil(&["table1", "--seeds", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["eps_kappa", "back", "off", "resN", "normN", "resR", "normR"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    for row in &rows {
        let v: Vec<f64> = row.iter().map(|x| x.parse().unwrap()).collect();
        assert!(v[3] <= 1e-12 && v[5] <= 1e-12);
    }
    let empty = pencil(&["table1", "--seeds", "0"]);
    assert_eq!(String::from_utf8(empty.stdout).unwrap().trim(), "eps_kappa,back,off,resN,normN,resR,normR");
}

#[test]
fn generated_document_round_trips() {
    let args = GenerateArgs { s: vec![2, 1], t: vec![3, 2, 1], seed: 4, disguise: true, fill: "complex".into(), tail: 1, lambda0: None };
    let doc = cmd_generate(&args).unwrap();
    let back: PencilDocument = serde_json::from_str(&doc.to_json()).unwrap();
    assert_eq!(back, doc);
}

/// Disguised random specs with dimensions up to 12 are recovered exactly.
#[test]
fn analyze_recovers_planted_indices() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut done = 0;
    while done < 50 {
        let mut s = Vec::new();
        let mut t = Vec::new();
        let mut bound = rng.random_range(1..=5usize);
        loop {
            let ti = rng.random_range(1..=bound);
            let si = rng.random_range(0..=ti);
            t.push(ti);
            s.push(si);
            if si == 0 || rng.random_bool(0.3) {
                break;
            }
            bound = si;
        }
        let tail = rng.random_range(0..3);
        let (m, n) = (s.iter().sum::<usize>() + tail, t.iter().sum::<usize>() + tail);
        if m > 12 || n > 12 {
            continue;
        }
        let fill = if done % 2 == 0 { "gaussian" } else { "complex" };
        let args = GenerateArgs { s: s.clone(), t: t.clone(), seed: done, disguise: true, fill: fill.into(), tail, lambda0: None };
        let path = dir.path().join(format!("spec{done}.json"));
        std::fs::write(&path, cmd_generate(&args).unwrap().to_json()).unwrap();
        let rep = cmd_analyze(&AnalyzeArgs {
            source: Source::Json(path),
            lambda0: None,
            tol: None,
            refine_iters: 2,
            verify: false,
            expand_monomial: false,
        })
        .unwrap();
        // a trailing s = 0 step is implied by the planted lists
        let mut got_s = rep.staircase.s.clone();
        if got_s.len() == s.len() + 1 && got_s.last() == Some(&0) {
            got_s.pop();
        }
        assert_eq!((got_s, &rep.staircase.t), (s.clone(), &t), "spec s={s:?} t={t:?} tail={tail}");
        done += 1;
    }
}
