//! End-to-end checks of the command-line binary.

use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_phaserank"))
}

fn json_stdout(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is valid json")
}

#[test]
fn rank3_reports_rank_two_with_witness() {
    let out = bin()
        .args(["rank3", "--matrix", "1,1,1;1,i,-i;1,1,i"])
        .output()
        .unwrap();
    let v = json_stdout(&out);
    assert_eq!(v["rank"], 2);
    assert_eq!(v["certificate"], "relint");
    let residual = v["witness"]["det_residual"].as_f64().unwrap();
    assert!(residual < 1e-8);
    let entries = v["witness"]["matrix"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 3);
}

#[test]
fn upper_bound_hundred_square() {
    let out = bin()
        .args(["upper-bound", "--n", "100", "--m", "100"])
        .output()
        .unwrap();
    let v = json_stdout(&out);
    assert_eq!(v["bound"], 91);
}

#[test]
fn parse_errors_exit_one() {
    let out = bin()
        .args(["analyze", "--matrix", "not-a-matrix"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin()
        .args(["coverage", "--matrix", "1,1;1,-1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn matrix_json_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    std::fs::write(
        &path,
        r#"{"angles_pi": [["0", "0", "0"], ["0", "1/2", "-1/2"], ["0", "0", "1/2"]]}"#,
    )
    .unwrap();
    let out = bin()
        .args(["rank3", "--input", path.to_str().unwrap()])
        .output()
        .unwrap();
    let v = json_stdout(&out);
    assert_eq!(v["rank"], 2);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = bin()
        .args(["analyze", "--matrix", "1,1;1,-1", "--out", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["exact"], 2);
    assert!(v["provenance"].is_object());
}

#[test]
fn seed_env_matches_flag() {
    let flag = bin()
        .args(["volume", "--n", "3", "--samples", "50000", "--seed", "11"])
        .output()
        .unwrap();
    let env = bin()
        .args(["volume", "--n", "3", "--samples", "50000"])
        .env("PHASERANK_SEED", "11")
        .output()
        .unwrap();
    let a = json_stdout(&flag);
    let b = json_stdout(&env);
    assert_eq!(a["fraction"], b["fraction"]);
    assert_eq!(b["seed"], 11);
}

#[test]
fn coverage_svg_and_csv_have_headers() {
    let m = "1,1,1;1,e^{ipi/2},e^{i2pi/3};1,e^{-ipi/2},e^{ipi/6}";
    let svg = bin()
        .args(["coverage", "--matrix", m, "--resolution", "64", "--format", "svg"])
        .output()
        .unwrap();
    assert!(svg.status.success());
    let text = String::from_utf8(svg.stdout).unwrap();
    assert!(text.starts_with("<!--"));
    assert!(text.contains("<svg"));

    let csv = bin()
        .args(["coverage", "--matrix", m, "--resolution", "16", "--format", "csv"])
        .output()
        .unwrap();
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.contains("s,t,status"));
    assert!(text.contains("covered"));
}

#[test]
fn slice_rejects_one_free_slot() {
    let out = bin()
        .args(["slice", "--template", "1,1,1;1,t1,1;1,1,1", "--resolution", "16"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
