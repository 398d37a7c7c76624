mod common;

use common::{check_schema, stdout, wedgeflow};
use serde_json::Value;

const GAS: [&str; 6] = ["--gamma", "2", "--rho0", "1", "--rho1", "2"];

fn args<'a>(cmd: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend(GAS);
    v.extend(extra);
    v
}

#[test]
fn outputs_match_snapshots() {
    check_schema().unwrap();
}

#[test]
fn exit_codes() {
    let code = |a: &[&str]| wedgeflow(a).status.code().unwrap();
    assert_eq!(
        code(&["angles", "--gamma", "2", "--rho0", "1", "--rho1", "1"]),
        2
    );
    assert_eq!(
        code(&["angles", "--gamma", "0.5", "--rho0", "1", "--rho1", "2"]),
        2
    );
    assert_eq!(
        code(&["polar", "--gamma", "2", "--rho0", "1", "--rho1", "2"]),
        2
    );
    assert_eq!(code(&args("polar", &["--theta-deg", "30"])), 3);
    assert_eq!(code(&args("configure", &["--theta-deg", "30"])), 3);
    assert_eq!(code(&args("polar", &["--theta-deg", "95"])), 2);
    assert_eq!(code(&args("angles", &["--format", "csv"])), 2);
    assert_eq!(code(&args("sweep", &["--thetas", "60:89"])), 2);
    assert_eq!(
        code(&args("solve", &["--theta-deg", "85", "--grid", "4x4"])),
        2
    );
    assert_eq!(code(&args("angles", &[])), 0);
}

#[test]
fn sweep_has_one_row_per_angle() {
    let out = wedgeflow(&args("sweep", &["--thetas", "60:89:30", "--format", "csv"]));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 31);
    assert!(lines[0].starts_with("theta_deg,status,"));
    assert!(lines[1..]
        .iter()
        .all(|l| l.split(',').nth(1) == Some("two_roots")));

    let json: Value = serde_json::from_str(&stdout(&wedgeflow(&args(
        "sweep",
        &["--thetas", "40:60:5"],
    ))))
    .unwrap();
    let rows = json.as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0]["status"], "no_root");
    assert!(rows[0]["q2_weak"].is_null());
}

#[test]
fn out_flag_writes_what_stdout_would() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("angles.json");
    let printed = stdout(&wedgeflow(&args("angles", &[])));
    let out = wedgeflow(&args("angles", &["--out", path.to_str().unwrap()]));
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
}

#[test]
fn solve_and_diagnose_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = wedgeflow(&args(
        "solve",
        &["--theta-deg", "85", "--grid", "16x16", "--out", d],
    ));
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let record: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(record["status"], "converged");
    assert_eq!(record["solver"]["n1"], 16);

    let field = std::fs::read_to_string(dir.path().join("field.csv")).unwrap();
    assert_eq!(field.lines().count(), 1 + 17 * 17);
    let shock = std::fs::read_to_string(dir.path().join("shock.csv")).unwrap();
    assert_eq!(shock.lines().count(), 1 + 17);
    let on_disk: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("diagnostics.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(on_disk, record);

    let again: Value =
        serde_json::from_str(&stdout(&wedgeflow(&["diagnose", "--dir", d]))).unwrap();
    let before = record["diagnostics"].as_object().unwrap();
    let after = again.as_object().unwrap();
    assert_eq!(before.len(), after.len());
    for (k, v) in before {
        let (a, b) = (v.as_f64().unwrap(), after[k].as_f64().unwrap());
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{k}: {a} vs {b}");
    }
}

#[test]
fn iteration_cap_exits_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = wedgeflow(&args(
        "solve",
        &[
            "--theta-deg",
            "85",
            "--grid",
            "16x16",
            "--max-outer",
            "1",
            "--out",
            d,
        ],
    ));
    assert_eq!(out.status.code(), Some(4));
    let record: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(record["status"], "not_converged");
    assert!(record["diagnostics"]["rh_residual_max"].as_f64().unwrap() > 0.0);
    assert!(dir.path().join("field.csv").exists());
}
