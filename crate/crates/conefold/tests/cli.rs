//! End-to-end checks of the command-line binary.

use std::path::Path;
use std::process::Command;

fn conefold() -> Command {
    Command::new(env!("CARGO_BIN_EXE_conefold"))
}

fn write_job(dir: &Path, name: &str, body: serde_json::Value) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(&body).unwrap()).unwrap();
    path
}

#[test]
fn flex_job_writes_frames_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(
        dir.path(),
        "job.json",
        serde_json::json!({
            "mode": "cone-discrete",
            "selector": {"u": 2, "v": 2, "mn": 'M'},
            "free": {"m": 0.5, "s1": 2.0, "s3": 0.3333333333333333, "t1": 3.0},
            "faces": 12,
            "sweep": {"count": 20, "start": 0.2, "end": 1.2}
        }),
    );
    let out = dir.path().join("out");
    let status = conefold()
        .args(["flex", "--job"])
        .arg(&job)
        .arg("--out-dir")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    for k in 0..20 {
        let frame = out.join(format!("frame_{k:03}.obj"));
        assert!(frame.exists(), "missing {}", frame.display());
    }
    assert!(out.join("report.csv").exists());
    let csv = std::fs::read_to_string(out.join("report.csv")).unwrap();
    assert!(csv.starts_with("parameter,residual,value"));
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(
        dir.path(),
        "job.json",
        serde_json::json!({
            "mode": "cyl-discrete",
            "cylinder": {"s1": 0.7, "s2": 0.35, "s3": 1.6, "t1": 1.2},
            "faces": 6,
            "sweep": {"count": 5, "start": 0.1, "end": 0.6}
        }),
    );
    let mut bytes = Vec::new();
    for sub in ["a", "b"] {
        let out = dir.path().join(sub);
        let status = conefold()
            .args(["flex", "--job"])
            .arg(&job)
            .arg("--out-dir")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        let mut names: Vec<_> = std::fs::read_dir(&out)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        names.sort();
        let blob: Vec<u8> = names
            .iter()
            .flat_map(|p| std::fs::read(p).unwrap())
            .collect();
        bytes.push(blob);
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn infeasible_branch_exits_nonzero_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    // this branch pair is not realizable for the given free parameters
    let job = write_job(
        dir.path(),
        "job.json",
        serde_json::json!({
            "mode": "cone-discrete",
            "selector": {"u": 1, "v": 1, "mn": 'M'},
            "free": {"m": 0.5, "s1": 2.0, "s3": 0.3333333333333333, "t1": 3.0}
        }),
    );
    let out = conefold()
        .args(["synth", "--job"])
        .arg(&job)
        .arg("--out-dir")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("branch infeasible"),
        "diagnostic should name the failing factor: {stderr}"
    );
}

#[test]
fn schema_violations_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"mode": "cone-discrete", "bogus": 1}"#).unwrap();
    let out = conefold()
        .args(["verify", "--job"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown field"));
}

#[test]
fn smooth_job_reports_unit_curvature() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(
        dir.path(),
        "job.json",
        serde_json::json!({
            "mode": "cyl-smooth",
            "grid": {"start": -1.3, "end": 1.3, "step": 0.001},
            "profile": {"neg-cos": null},
            "deformation": [1.0]
        }),
    );
    let out_dir = dir.path().join("out");
    let out = conefold()
        .args(["smooth", "--job"])
        .arg(&job)
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(out_dir.join("report.csv")).unwrap();
    let kappa_rows: Vec<&str> = csv
        .lines()
        .filter(|l| l.contains("value_kappa"))
        .collect();
    assert_eq!(kappa_rows.len(), 2);
    for row in kappa_rows {
        let value: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!((value - 1.0).abs() < 1e-8, "κ row {row}");
    }
}
