use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn bpl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bpl"))
        .args(args)
        .env_remove("BPL_MAX_L")
        .output()
        .expect("bpl runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn all_passes_and_reports_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = bpl(&["all", "--L", "3", "--n", "1", "--seed", "9", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.contains("omega.closedform") && table.contains("checks passed"));

    let rep: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rep["summary"]["pass"], true);
    let checks = rep["checks"].as_array().unwrap();
    assert!(checks.len() > 10);
    for c in checks {
        for key in ["name", "residual", "tolerance", "pass", "wall_ms"] {
            assert!(c.get(key).is_some(), "missing {key}");
        }
    }
    assert!(rep["extras"]["omega.commutators"].is_array());
}

#[test]
fn output_is_deterministic() {
    let strip = |o: Output| -> Value {
        let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
        for c in v["checks"].as_array_mut().unwrap() {
            c["wall_ms"] = Value::Null;
        }
        v
    };
    let a = strip(bpl(&["omega", "extract", "--L", "3", "--n", "2", "--json"]));
    let b = strip(bpl(&["omega", "extract", "--L", "3", "--n", "2", "--json"]));
    assert_eq!(a, b);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.json");
    fs::write(
        &path,
        r#"{"L": 2, "n": 1, "gamma": {"re": 0.4, "im": 0.2},
            "mu": [{"re": 0.1, "im": 0.0}, {"re": -0.3, "im": 0.2}], "tol": 1e-8, "seed": 5}"#,
    )
    .unwrap();
    let o = bpl(&["pde", "special", "--config", path.to_str().unwrap(), "--json"]);
    assert_eq!(code(&o), 0);
    let rep: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep["instance"]["tol"], 1e-8);
    assert_eq!(rep["instance"]["gamma"][0], 0.4);

    // overriding L leaves mu with the wrong length
    let o = bpl(&["verify", "rtt", "--config", path.to_str().unwrap(), "--L", "3"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("mu"));
}

#[test]
fn missing_mu_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.json");
    fs::write(&path, r#"{"L": 3, "n": 1}"#).unwrap();
    let o = bpl(&["fz", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("mu"));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&bpl(&["verify", "ybe", "--L", "2", "--n", "3"])), 2);
    assert_eq!(code(&bpl(&["reduce", "--L", "2", "--n", "1"])), 2);
    assert_eq!(code(&bpl(&["spectrum", "--L", "13"])), 3);
    let raised = Command::new(env!("CARGO_BIN_EXE_bpl"))
        .args(["verify", "ybe", "--L", "13"])
        .env("BPL_MAX_L", "13")
        .output()
        .unwrap();
    assert_eq!(code(&raised), 0);
    // an absurd tolerance makes checks fail
    assert_eq!(code(&bpl(&["verify", "rtt", "--L", "3", "--tol", "1e-30"])), 1);
}
