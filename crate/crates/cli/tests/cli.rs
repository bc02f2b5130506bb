use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use dste_cli::{main_with, VERSION};
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn dste(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = main_with(
        std::iter::once("dste").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn manifest(path: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(format!("{path}.manifest.json")).unwrap()).unwrap()
}

/// Two well-separated features plus a small anomaly cluster.
fn generate(dir: &Path, name: &str, n: &str, seed: &str) -> String {
    let out = p(dir, name);
    let r = dste(&[
        "generate",
        "--normal-mu",
        "25,50",
        "--normal-sigma",
        "0.5,1",
        "--faulty-mu",
        "30,60",
        "--faulty-sigma",
        "0.5,1",
        "--n",
        n,
        "--n-faulty",
        "20",
        "--seed",
        seed,
        "--out",
        &out,
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    out
}

#[test]
fn generate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = generate(dir.path(), "a.csv", "1000", "7");
    let b = generate(dir.path(), "b.csv", "1000", "7");
    let text = fs::read(&a).unwrap();
    assert_eq!(text, fs::read(&b).unwrap());
    assert_eq!(String::from_utf8(text).unwrap().lines().count(), 1 + 1020);

    let m = manifest(&a);
    assert_eq!(m["status"], "ok");
    assert_eq!(m["version"], VERSION);
    assert_eq!(m["params"]["generate"]["seed"], 7);
}

#[test]
fn generate_zero_rows_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path(), "empty.csv");
    let r = dste(&[
        "generate",
        "--normal-mu",
        "1",
        "--normal-sigma",
        "1",
        "--n",
        "0",
        "--out",
        &out,
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(
        fs::read_to_string(&out).unwrap().trim(),
        "timestamp,temperature,humidity,label"
    );
}

#[test]
fn missing_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path(), "x.csv");
    let r = dste(&["generate", "--normal-mu", "1", "--n", "5", "--out", &out]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("--normal-sigma"), "{}", r.stderr);
}

#[test]
fn bad_rate_fails_with_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let clean = generate(dir.path(), "clean.csv", "100", "1");
    let out = p(dir.path(), "f.csv");
    let r = dste(&[
        "inject", "--fault", "gain", "--beta", "2", "--rate", "1.5", "--in", &clean, "--out", &out,
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("RateOutOfRange"), "{}", r.stderr);
    let m = manifest(&out);
    assert_eq!(m["status"], "error");
    assert_eq!(m["error"]["code"], "RateOutOfRange");
    assert_eq!(m["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn inject_replays_identically() {
    let dir = tempfile::tempdir().unwrap();
    let clean = generate(dir.path(), "clean.csv", "500", "2");
    let outs: Vec<String> = ["a.csv", "b.csv"]
        .iter()
        .map(|name| {
            let out = p(dir.path(), name);
            let r = dste(&[
                "inject",
                "--fault",
                "gain",
                "--beta",
                "2",
                "--rate",
                "0.1",
                "--eta-std",
                "0.2",
                "--seed",
                "9",
                "--in",
                &clean,
                "--out",
                &out,
            ]);
            assert_eq!(r.code, 0, "{}", r.stderr);
            out
        })
        .collect();
    assert_eq!(fs::read(&outs[0]).unwrap(), fs::read(&outs[1]).unwrap());
    let report: Value =
        serde_json::from_str(&fs::read_to_string(format!("{}.report.json", outs[0])).unwrap())
            .unwrap();
    assert_eq!(report["faulted"].as_array().unwrap().len(), 52);
}

#[test]
fn fit_classify_evaluate_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let clean = generate(dir.path(), "clean.csv", "2000", "3");
    let faulted = p(dir.path(), "faulted.csv");
    let r = dste(&[
        "inject", "--fault", "gain", "--beta", "2", "--rate", "0.1", "--seed", "4", "--in", &clean,
        "--out", &faulted,
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);

    let model = p(dir.path(), "model.json");
    let test = p(dir.path(), "test.csv");
    let r = dste(&[
        "fit",
        "--train",
        &faulted,
        "--split-fraction",
        "0.7",
        "--split-seed",
        "5",
        "--out",
        &model,
        "--test-out",
        &test,
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let n_test = fs::read_to_string(&test).unwrap().lines().count() - 1;
    assert_eq!(n_test, 2020 - 1414);

    let report = p(dir.path(), "report.json");
    let roc = p(dir.path(), "roc.csv");
    let r = dste(&[
        "evaluate",
        "--model",
        &model,
        "--test",
        &test,
        "--out-report",
        &report,
        "--out-roc",
        &roc,
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("accuracy"));
    let rep: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["fpr"], 0.0);
    let accuracy = rep["accuracy"].as_f64().unwrap();

    // the ROC file is a monotone staircase from (0,0) to (1,1)
    let points: Vec<(f64, f64)> = fs::read_to_string(&roc)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (v[0], v[1])
        })
        .collect();
    assert_eq!(points[0], (0.0, 0.0));
    assert_eq!(*points.last().unwrap(), (1.0, 1.0));
    assert!(points
        .windows(2)
        .all(|w| w[0].0 <= w[1].0 && w[0].1 <= w[1].1));

    // inverting every label inverts accuracy
    let inverted = p(dir.path(), "inverted.csv");
    let text = fs::read_to_string(&test).unwrap();
    let mut lines = text.lines();
    let mut flipped = vec![lines.next().unwrap().to_string()];
    for l in lines {
        let (head, label) = l.rsplit_once(',').unwrap();
        flipped.push(format!("{head},{}", if label == "0" { 1 } else { 0 }));
    }
    fs::write(&inverted, flipped.join("\n") + "\n").unwrap();
    let inv_report = p(dir.path(), "inv.json");
    let r = dste(&[
        "evaluate",
        "--model",
        &model,
        "--test",
        &inverted,
        "--out-report",
        &inv_report,
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let inv: Value = serde_json::from_str(&fs::read_to_string(&inv_report).unwrap()).unwrap();
    assert!((inv["accuracy"].as_f64().unwrap() - (1.0 - accuracy)).abs() < 1e-12);

    // classify keeps input order and tolerates missing cells
    let input = p(dir.path(), "one.csv");
    fs::write(&input, "temperature,humidity\n25.1,\n,\n31,62\n").unwrap();
    let decisions = p(dir.path(), "decisions.csv");
    let r = dste(&[
        "classify", "--model", &model, "--in", &input, "--out", &decisions,
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows: Vec<String> = fs::read_to_string(&decisions)
        .unwrap()
        .lines()
        .skip(1)
        .map(String::from)
        .collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("0,0,"));
    assert!(
        rows[1].starts_with("1,1,"),
        "all-missing record: {}",
        rows[1]
    );
    assert!(rows[2].starts_with("2,1,"));
}

#[test]
fn single_class_training_names_the_class() {
    let dir = tempfile::tempdir().unwrap();
    let train = p(dir.path(), "normal.csv");
    let r = dste(&[
        "generate",
        "--normal-mu",
        "1",
        "--normal-sigma",
        "1",
        "--n",
        "50",
        "--out",
        &train,
    ]);
    assert_eq!(r.code, 0);
    let model = p(dir.path(), "m.json");
    let r = dste(&["fit", "--train", &train, "--no-split", "--out", &model]);
    assert_eq!(r.code, 3);
    assert!(
        r.stderr.starts_with("InsufficientClassData"),
        "{}",
        r.stderr
    );
    assert!(r.stderr.contains("faulty"), "{}", r.stderr);
    assert_eq!(manifest(&model)["status"], "error");
}

#[test]
fn sweep_is_deterministic_and_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let clean = generate(dir.path(), "clean.csv", "1000", "6");
    let outs: Vec<String> = ["s1.csv", "s2.csv"]
        .iter()
        .map(|name| {
            let out = p(dir.path(), name);
            let r = dste(&[
                "sweep", "--in", &clean, "--rates", "0.2,0.1", "--betas", "4,2", "--alpha", "10",
                "--gamma1", "-40", "--gamma2", "125", "--seed", "3", "--out", &out,
            ]);
            assert_eq!(r.code, 0, "{}", r.stderr);
            out
        })
        .collect();
    let text = fs::read_to_string(&outs[0]).unwrap();
    assert_eq!(text, fs::read_to_string(&outs[1]).unwrap());
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(
        rows[0].join(","),
        "fault,rate,beta,accuracy,fpr,precision,sensitivity,specificity,auc"
    );
    assert_eq!(rows.len(), 1 + 4 * 2 * 2);
    let keys: Vec<(String, f64, f64)> = rows[1..]
        .iter()
        .map(|r| {
            (
                r[0].to_string(),
                r[1].parse().unwrap(),
                r[2].parse().unwrap(),
            )
        })
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then(a.2.total_cmp(&b.2))
    });
    assert_eq!(keys, sorted);
}

#[test]
fn probe_normality_reports_r_squared() {
    let dir = tempfile::tempdir().unwrap();
    let data = p(dir.path(), "n.csv");
    let r = dste(&[
        "generate",
        "--normal-mu",
        "10",
        "--normal-sigma",
        "2",
        "--n",
        "3000",
        "--seed",
        "1",
        "--out",
        &data,
    ]);
    assert_eq!(r.code, 0);
    let out = p(dir.path(), "pp.csv");
    let r = dste(&[
        "probe-normality",
        "--in",
        &data,
        "--feature",
        "humidity",
        "--out",
        &out,
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let r2: f64 = r.stdout.trim().rsplit('=').next().unwrap().parse().unwrap();
    assert!(r2 >= 0.999, "{r2}");
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 3001);

    let constant = p(dir.path(), "c.csv");
    fs::write(&constant, "t\n1\n1\n1\n1\n").unwrap();
    let r = dste(&[
        "probe-normality",
        "--in",
        &constant,
        "--feature",
        "t",
        "--out",
        &out,
    ]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.starts_with("InsufficientData"));
}

#[test]
fn explicit_manifest_path_and_missing_input() {
    let dir = tempfile::tempdir().unwrap();
    let m = p(dir.path(), "run.json");
    let out = p(dir.path(), "o.csv");
    let missing = p(dir.path(), "nope.csv");
    let r = dste(&[
        "--manifest",
        &m,
        "probe-normality",
        "--in",
        &missing,
        "--feature",
        "t",
        "--out",
        &out,
    ]);
    assert_eq!(r.code, 3);
    let v: Value = serde_json::from_str(&fs::read_to_string(&m).unwrap()).unwrap();
    assert_eq!(v["error"]["code"], "IoFailure");
    assert_eq!(v["inputs"][0]["sha256"], Value::Null);
}

#[test]
fn binary_reports_version_and_exit_codes() {
    let exe = PathBuf::from(env!("CARGO_BIN_EXE_dste"));
    let out = Command::new(&exe).arg("--version").output().unwrap();
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        format!("dste {VERSION}")
    );

    let out = Command::new(&exe)
        .args(["inject", "--fault", "bogus"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
