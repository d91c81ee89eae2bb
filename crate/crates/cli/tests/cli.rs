use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn lrscatter(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lrscatter")).current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) {
    let out = lrscatter(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn summary(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path.join("summary.json")).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(Result::unwrap).collect()
}

#[test]
fn eig_writes_tables_with_plateau_and_decay() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["eig", "--c", "30", "--out", "eig30"]);
    ok(tmp.path(), &["eig", "--c", "90", "--out", "eig90"]);
    let rows = csv_rows(&tmp.path().join("eig30/eigenvalues.csv"));
    let lambda00: f64 = rows[0][3].parse().unwrap();
    assert!((lambda00 - 2.0 * std::f64::consts::PI / 30.0).abs() < 1e-10);
    let decay = csv_rows(&tmp.path().join("eig30/decay.csv"));
    let orders: std::collections::BTreeSet<usize> = decay.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(orders.iter().all(|m| m % 5 == 0) && orders.contains(&35));
    let above = |dir: &str| {
        let rows = csv_rows(&tmp.path().join(dir).join("eigenvalues.csv"));
        let l00: f64 = rows[0][3].parse().unwrap();
        rows.iter().filter(|r| r[3].parse::<f64>().unwrap() > 0.5 * l00).count()
    };
    assert!(above("eig90") > above("eig30"));
    let s = summary(&tmp.path().join("eig30"));
    assert!((s["resolved"]["hilbert_schmidt_sum"].as_f64().unwrap() - std::f64::consts::PI.powi(2)).abs() < 1e-8);
}

#[test]
fn eig_at_tiny_bandwidth_tops_out_near_pi() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["eig", "--c", "0.01", "--out", "e"]);
    let top: f64 = csv_rows(&tmp.path().join("e/eigenvalues.csv"))[0][3].parse().unwrap();
    assert!((top - std::f64::consts::PI).abs() < 1e-3, "{top}");
}

#[test]
fn synth_is_reproducible_by_seed_and_rerun() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let base = ["synth", "--contrast", "three-rectangles", "--k", "15", "--n1", "30", "--n2", "20", "--delta", "0.2"];
    ok(dir, &[&base[..], &["--seed", "4", "--out", "a"]].concat());
    ok(dir, &[&base[..], &["--seed", "4", "--out", "b"]].concat());
    ok(dir, &[&base[..], &["--seed", "5", "--out", "c"]].concat());
    let read = |d: &str| fs::read(dir.join(d).join("farfield.csv")).unwrap();
    assert_eq!(read("a"), read("b"));
    assert_ne!(read("a"), read("c"));
    ok(dir, &["rerun", "a/summary.json", "--out", "again"]);
    assert_eq!(read("a"), read("again"));
    assert_eq!(summary(&dir.join("a"))["config"]["seed"], 4);
}

#[test]
fn noiseless_synth_ignores_the_seed() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    for seed in ["1", "2"] {
        ok(dir, &["synth", "--contrast", "disk:0.5", "--n1", "12", "--n2", "12", "--seed", seed, "--out", seed]);
    }
    assert_eq!(fs::read(dir.join("1/farfield.csv")).unwrap(), fs::read(dir.join("2/farfield.csv")).unwrap());
}

#[test]
fn reconstruct_writes_every_artifact() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    ok(dir, &["reconstruct", "--contrast", "pswf:3,2,2", "--k", "15", "--n1", "200", "--n2", "200", "--grid", "64", "--out", "r"]);
    let s = summary(&dir.join("r"));
    for f in ["coefficients.csv", "grid.csv", "reconstruction.pgm", "summary.json"] {
        assert!(dir.join("r").join(f).exists(), "{f}");
        assert!(s["files"].as_array().unwrap().iter().any(|v| v == f));
    }
    for key in ["c", "k", "n1", "n2", "T", "M", "epsilon", "cutoff_size", "seed"] {
        assert!(!s["resolved"][key].is_null(), "{key}");
    }
    assert_eq!(s["resolved"]["mode"], "noiseless-born");
    assert!(s["metrics"]["relative_l2_error"].as_f64().unwrap() < 0.1);
    let grid = csv_rows(&dir.join("r/grid.csv"));
    assert_eq!(grid.len(), 64 * 64);
    assert!(grid.iter().any(|r| &r[4] == "1" && r[2].is_empty()));
    let pgm = fs::read(dir.join("r/reconstruction.pgm")).unwrap();
    let header: Vec<&[u8]> = pgm.split(|b| b.is_ascii_whitespace()).take(4).collect();
    assert_eq!(header, [&b"P5"[..], b"64", b"64", b"255"]);
    assert!(pgm.len() > 64 * 64 && pgm.len() < 64 * 64 + 20);
}

#[test]
fn external_csv_runs_in_full_data_mode() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    ok(dir, &["synth", "--contrast", "rect:0.4,0.3", "--k", "10", "--n1", "60", "--n2", "60", "--delta", "0.05", "--out", "s"]);
    let before = fs::read(dir.join("s/farfield.csv")).unwrap();
    ok(dir, &["reconstruct", "--input-farfield", "s/farfield.csv", "--mode", "full-data", "--grid", "32", "--out", "r"]);
    assert_eq!(fs::read(dir.join("s/farfield.csv")).unwrap(), before);
    let s = summary(&dir.join("r"));
    assert!((s["resolved"]["epsilon_over_lambda00"].as_f64().unwrap() - 0.9).abs() < 1e-12);
    assert_eq!(s["resolved"]["k"], 10.0);
    assert!(s["metrics"]["relative_l2_error"].is_null());
}

#[test]
fn oversized_cutoff_gives_zero_reconstruction_and_a_warning() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    ok(dir, &["reconstruct", "--contrast", "disk:0.5", "--k", "5", "--n1", "20", "--n2", "20", "--epsilon", "100", "--grid", "16", "--out", "r"]);
    let s = summary(&dir.join("r"));
    assert_eq!(s["resolved"]["cutoff_size"], 0);
    assert_eq!(s["metrics"]["coefficient_norm"], 0.0);
    assert_eq!(s["warnings"].as_array().unwrap().len(), 1);
}

#[test]
fn sweep_aggregates_errors_per_value() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    ok(dir, &[
        "sweep", "--contrast", "rect:0.5,0.5", "--k", "15", "--n1", "100", "--n2", "100",
        "--axis", "delta", "--values", "0,0.1,0.2", "--seeds", "10", "--epsilon", "0.0418879020478639", "--grid", "16", "--out", "sw",
    ]);
    let rows = csv_rows(&dir.join("sw/errors.csv"));
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| &r[0] == "delta"));
    let err: Vec<f64> = rows.iter().map(|r| r[10].parse().unwrap()).collect();
    assert!(err[0] <= err[1] && err[1] <= err[2], "{err:?}");
    for i in 0..3 {
        assert!(dir.join(format!("sw/delta-{i}/summary.json")).exists());
    }
    ok(dir, &["sweep", "--contrast", "disk:0.3", "--axis", "N", "--values", "20,40", "--grid", "8", "--out", "n"]);
    let rows = csv_rows(&dir.join("n/errors.csv"));
    assert_eq!((&rows[1][3], &rows[1][4]), ("40", "40"));
}

#[test]
fn exit_codes_follow_the_error_kind() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let code = |args: &[&str]| lrscatter(dir, args).status.code().unwrap();
    assert_eq!(code(&["reconstruct", "--contrast", "disk:1.5"]), 2);
    assert_eq!(code(&["reconstruct", "--k", "15"]), 2);
    assert_eq!(code(&["sweep", "--contrast", "disk:0.3", "--axis", "k", "--values", "10"]), 2);
    assert_eq!(code(&["sweep", "--contrast", "disk:0.3", "--axis", "N", "--values", "10,20.5"]), 2);
    assert_eq!(code(&["reconstruct", "--input-farfield", "absent.csv"]), 2);
    fs::write(dir.join("bad.csv"), "# farfield k=5 n1=2 n2=1\nrow,col,re,im\n0,0,1,0\n1,0,x,0\n").unwrap();
    let out = lrscatter(dir, &["reconstruct", "--input-farfield", "bad.csv"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4, column 3"));
    fs::write(dir.join("summary.json"), "{ not json").unwrap();
    assert_eq!(code(&["rerun", "summary.json"]), 3);
}
