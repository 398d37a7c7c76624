#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

pub fn wedgeflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wedgeflow"))
        .args(args)
        .output()
        .expect("spawn wedgeflow")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const GAS: [&str; 6] = ["--gamma", "2", "--rho0", "1", "--rho1", "2"];

/// Snapshot name and the arguments that produce it.
pub fn schema_cases() -> Vec<(&'static str, Vec<&'static str>)> {
    let with = |cmd: &'static str, extra: &[&'static str]| {
        let mut v = vec![cmd];
        v.extend(GAS);
        v.extend(extra);
        v
    };
    vec![
        ("angles.json", with("angles", &[])),
        ("normal_reflection.json", with("normal-reflection", &[])),
        ("polar_85_weak.json", with("polar", &["--theta-deg", "85"])),
        (
            "polar_85_strong.json",
            with("polar", &["--theta-deg", "85", "--branch", "strong"]),
        ),
        (
            "configure_85.json",
            with("configure", &["--theta-deg", "85"]),
        ),
        (
            "sweep_60_89_30.csv",
            with("sweep", &["--thetas", "60:89:30", "--format", "csv"]),
        ),
        (
            "sweep_50_89_4.json",
            with("sweep", &["--thetas", "50:89:4"]),
        ),
    ]
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Compares every snapshot byte for byte. Set `WEDGEFLOW_BLESS=1` to rewrite them.
pub fn check_schema() -> Result<usize, String> {
    let bless = std::env::var_os("WEDGEFLOW_BLESS").is_some();
    let cases = schema_cases();
    for (name, args) in &cases {
        let out = wedgeflow(args);
        if !out.status.success() {
            return Err(format!("{name}: exit {:?}", out.status.code()));
        }
        let path = golden_dir().join(name);
        if bless {
            std::fs::write(&path, &out.stdout).unwrap();
            continue;
        }
        let want = std::fs::read(&path).map_err(|e| format!("{name}: {e}"))?;
        if want != out.stdout {
            return Err(format!("{name}: output differs from snapshot"));
        }
    }
    Ok(cases.len())
}
