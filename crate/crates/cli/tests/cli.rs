use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const TOY_TRAIN: &str = "@problemName toy
@univariate true
@equalLength true
@seriesLength 4
@classLabel true a b
@data
0,0,0,0:a
0,0.1,0,0:a
5,5,5,5:b
5,5.1,5,5:b
";

const TOY_TEST: &str = "@problemName toy
@univariate true
@equalLength true
@seriesLength 4
@classLabel true a b
@data
0,0,0.2,0:a
5,4.9,5,5:b
";

const RAGGED: &str = "@problemName ragged
@univariate true
@equalLength false
@classLabel true a b
@data
0,1,0,1,0,1,0,1,0,1:a
0,1,0,1,0,1,0,1,0:a
3,3,3,3,3,3,3,3,3,3,3:b
3,3,3,3,3,3,3,3,3,3:b
";

const TWO_CHANNEL: &str = "@problemName mv
@univariate false
@dimension 2
@equalLength true
@seriesLength 3
@classLabel false
@data
1,2,3:4,5,6
";

fn tsml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsml")).args(args).output().unwrap()
}

fn file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(out: &Output) -> Value {
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn knn_classifies_the_toy_problem() {
    let dir = tempfile::tempdir().unwrap();
    let train = file(dir.path(), "train.ts", TOY_TRAIN);
    let test = file(dir.path(), "test.ts", TOY_TEST);
    let v = json(&tsml(&[
        "classify",
        "--train",
        s(&train),
        "--test",
        s(&test),
        "--estimator",
        "knn",
    ]));
    assert_eq!(v["command"], "classify");
    assert_eq!(v["metrics"]["accuracy"], 1.0);
    assert_eq!(v["n_train"], 4);
    assert_eq!(v["n_test"], 2);
    assert_eq!(v["params"]["metric"], "dtw");
}

#[test]
fn ragged_rocket_needs_padding() {
    let dir = tempfile::tempdir().unwrap();
    let data = file(dir.path(), "ragged.ts", RAGGED);
    let base = [
        "classify",
        "--train",
        s(&data),
        "--test",
        s(&data),
        "--estimator",
        "rocket",
        "--kernels",
        "50",
    ];
    let out = tsml(&base);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unequal_length"));
    let mut padded = base.to_vec();
    padded.push("--pad");
    let v = json(&tsml(&padded));
    assert!(v["metrics"]["accuracy"].as_f64().unwrap() >= 0.5);
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let a = file(dir.path(), "a.txt", "1\n2\n3\n");
    let b = file(dir.path(), "b.txt", "3\n2\n1\n");
    let out_path = dir.path().join("result.json");
    let out = tsml(&["dist", "--a", s(&a), "--b", s(&b), "--out", s(&out_path)]);
    assert_eq!(json(&out)["metrics"]["distance"], 8.0);
    assert_eq!(std::fs::read(&out_path).unwrap(), out.stdout);
}

#[test]
fn clustering_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let data = file(dir.path(), "ragged.ts", RAGGED);
    let run = || {
        let mut v = json(&tsml(&[
            "cluster",
            "--data",
            s(&data),
            "--k",
            "2",
            "--averaging",
            "dba",
            "--seed",
            "7",
        ]));
        v.as_object_mut().unwrap().remove("runtime_ms");
        v
    };
    let first = run();
    assert_eq!(first, run());
    assert_eq!(first["metrics"]["agreement"], 1.0);
}

#[test]
fn forecast_methods() {
    let dir = tempfile::tempdir().unwrap();
    let line = file(dir.path(), "line.txt", "1\n2\n3\n4\n5\n6\n");
    let v = json(&tsml(&[
        "forecast",
        "--series",
        s(&line),
        "--method",
        "naive",
        "--fh",
        "1,3",
    ]));
    assert_eq!(v["metrics"]["fh_1"], 6.0);
    assert_eq!(v["metrics"]["fh_3"], 6.0);
    let v = json(&tsml(&[
        "forecast",
        "--series",
        s(&line),
        "--method",
        "trend",
        "--fh",
        "2",
    ]));
    assert!((v["metrics"]["fh_2"].as_f64().unwrap() - 8.0).abs() < 1e-9);
    let v = json(&tsml(&[
        "forecast",
        "--series",
        s(&line),
        "--method",
        "trend",
        "--fh",
        "1",
        "--holdout",
        "2",
    ]));
    assert!(v["metrics"]["mae"].as_f64().unwrap() < 1e-9);
    assert_eq!(
        tsml(&["forecast", "--series", s(&line), "--method", "naive", "--fh", "2,1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let one = file(dir.path(), "one.txt", "1\n2\n3\n");
    let mv = file(dir.path(), "mv.ts", TWO_CHANNEL);
    let bad = file(dir.path(), "bad.ts", "@problemName x\n@univariate maybe\n@data\n");
    let missing = dir.path().join("missing.txt");
    assert_eq!(
        tsml(&["dist", "--a", s(&missing), "--b", s(&one)]).status.code(),
        Some(2)
    );
    assert_eq!(
        tsml(&["dist", "--a", s(&mv), "--b", s(&one), "--metric", "msm"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(tsml(&["dist", "--a", s(&bad), "--b", s(&one)]).status.code(), Some(4));
    assert_eq!(
        tsml(&["dist", "--a", s(&one), "--b", s(&one), "--metric", "nope"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(tsml(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(tsml(&["--help"]).status.code(), Some(0));
}
