use std::path::PathBuf;
use std::process::{Command, Output};

fn hems(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hems"))
        .args(args)
        .env_clear()
        .output()
        .unwrap()
}

fn scenario(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const CASE: &str = "case2_static_pil_tou_tariff.json";

#[test]
fn compare_writes_both_artifact_sets() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results");
    let o = hems(&[
        "compare",
        "--scenario",
        &scenario(CASE),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in [
        "comparison.json",
        "baseline/load_curve.csv",
        "baseline/schedule.csv",
        "baseline/report.json",
        "scheduled/load_curve.csv",
        "scheduled/schedule.csv",
        "scheduled/report.json",
    ] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let line = stdout(&o);
    assert_eq!(line.lines().count(), 1);
    assert!(
        line.contains("savings=") && line.contains("peak_reduction="),
        "{line}"
    );
}

#[test]
fn run_matches_between_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = hems(&[
            "run",
            "--scenario",
            &scenario(CASE),
            "--mode",
            "scheduled",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(stdout(&o).contains("total_cost="));
    }
    for f in ["load_curve.csv", "schedule.csv", "report.json"] {
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn validate_accepts_calibration_files() {
    for name in [
        "case1_dynamic_pil_flat_tariff.json",
        CASE,
        "case3_dynamic_pil_tou_tariff.json",
    ] {
        let o = hems(&["validate", "--scenario", &scenario(name)]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(stdout(&o).contains("13 appliances"));
    }
}

#[test]
fn validate_names_bad_field() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(scenario(CASE)).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["requests"][0]["r_min"] = 7.into();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let o = hems(&["validate", "--scenario", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("requests[0].r_min"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn usage_errors_exit_one() {
    let o = hems(&["run", "--mode", "scheduled", "--out", "x"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--scenario"));
    assert_eq!(hems(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        hems(&["run", "--scenario", "a", "--mode", "fast", "--out", "x"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(hems(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_file_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = hems(&[
        "validate",
        "--scenario",
        dir.path().join("absent.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("absent.json"));
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let o = hems(&[
        "compare",
        "--scenario",
        &scenario(CASE),
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}
