use std::path::{Path, PathBuf};
use std::process::Command;

use kvc_core::cli_harness::{run, ScenarioConfig, EXIT_CHECK_FAILURE, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_PASS};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn kvc(cmd: &str, cfg: &Path, out: &Path, extra: &[&str]) -> i32 {
    let mut args = vec!["kvc".to_string(), cmd.into(), "--config".into(), cfg.display().to_string(), "--out".into(), out.display().to_string()];
    args.extend(extra.iter().map(|s| s.to_string()));
    run(args)
}

fn write_config(dir: &Path, json: &str) -> PathBuf {
    let p = dir.join("cfg.json");
    std::fs::write(&p, json).unwrap();
    p
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            // anchors may be quoted and contain commas; the id is always first
            let mut cols = Vec::new();
            let mut cur = String::new();
            let mut quoted = false;
            for ch in l.chars() {
                match ch {
                    '"' => quoted = !quoted,
                    ',' if !quoted => cols.push(std::mem::take(&mut cur)),
                    _ => cur.push(ch),
                }
            }
            cols.push(cur);
            cols
        })
        .collect()
}

fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn flat_identities_pass() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(kvc("identities", &config("flat.json"), out.path(), &[]), EXIT_PASS);
    let text = std::fs::read_to_string(out.path().join("identities.csv")).unwrap();
    assert!(text.starts_with("identity_id,paper_anchor,norm_type,residual,tolerance,pass\n"));
    let ids: Vec<String> = csv_rows(&out.path().join("identities.csv")).into_iter().map(|r| r[0].clone()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    assert!(ids.len() >= 25);
    let s = summary(out.path());
    assert_eq!(s["pass"], true);
    assert_eq!(s["command"], "identities");
}

#[test]
fn curved_identities_pass() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(kvc("identities", &config("curved.json"), out.path(), &[]), EXIT_PASS);
    for row in csv_rows(&out.path().join("identities.csv")) {
        if row[5] == "true" {
            assert!(row[3].parse::<f64>().unwrap() <= 1e-7, "{row:?}");
        }
    }
}

#[test]
fn forced_tight_tolerances_fail() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(kvc("identities", &config("strict.json"), out.path(), &[]), EXIT_CHECK_FAILURE);
    assert!(!summary(out.path())["failures"].as_array().unwrap().is_empty());
    let out = tempfile::tempdir().unwrap();
    assert_eq!(kvc("identities", &config("curved.json"), out.path(), &["--tolerance-scale", "1e-8"]), EXIT_CHECK_FAILURE);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let bad = [
        r#"{"n": 1, "resolution": 32, "phi": [{"mode": [1, 0], "amplitude": 0.2}]}"#,
        r#"{"n": 1, "resolution": 32, "h": [{"mode": [20, 0], "amplitude": 0.05}]}"#,
        r#"{"n": 1, "resolution": 32, "h": [{"mode": [1], "amplitude": 0.05}]}"#,
        r#"{"n": 1, "resolution": 30}"#,
        r#"{"n": 3, "resolution": 16}"#,
        r#"{"n": 1, "resolution": 32, "colour": "blue"}"#,
        r#"{"n": 1, "resolution": 32, "eps_ladder": [1e-2, 4e-3, 1e-3]}"#,
        r#"{"n": 1, "resolution": 32, "dt": -1e-4}"#,
        r#"{"n": 1, "resolution": 32, "tolerance": 0}"#,
        r#"{"n": 1, "resolution": 32, "variations": {"raw_v": [{"seed": 1, "amplitude": 0.5}]}}"#,
        r#"{"n": 1,"#,
    ];
    for json in bad {
        assert!(ScenarioConfig::from_json(json).is_err(), "{json}");
        let cfg = write_config(dir.path(), json);
        assert_eq!(kvc("identities", &cfg, &out, &[]), EXIT_CONFIG, "{json}");
    }
    assert_eq!(kvc("identities", &dir.path().join("missing.json"), &out, &[]), EXIT_CONFIG);
    let cfg = write_config(dir.path(), r#"{"n": 1, "resolution": 16}"#);
    assert_eq!(run(["kvc", "identities", "--config", cfg.to_str().unwrap()]), EXIT_CONFIG);
    assert_eq!(run(["kvc", "frobnicate"]), EXIT_CONFIG);
    assert_eq!(kvc("identities", &cfg, &out, &["--tolerance-scale", "-1"]), EXIT_CONFIG);
}

#[test]
fn output_dir_can_come_from_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("from_config");
    let json = format!(r#"{{"n": 1, "resolution": 16, "out": {:?}}}"#, out.display().to_string());
    let cfg = write_config(dir.path(), &json);
    assert_eq!(run(["kvc", "identities", "--config", cfg.to_str().unwrap()]), EXIT_PASS);
    assert!(out.join("identities.csv").exists());
}

#[test]
fn identical_seeds_give_identical_csv() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let cfg = config("curved.json");
    assert_eq!(kvc("identities", &cfg, a.path(), &["--seed", "11"]), EXIT_PASS);
    assert_eq!(kvc("identities", &cfg, b.path(), &["--seed", "11"]), EXIT_PASS);
    assert_eq!(kvc("identities", &cfg, c.path(), &["--seed", "12"]), EXIT_PASS);
    let read = |d: &Path| std::fs::read(d.join("identities.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    assert_ne!(read(a.path()), read(c.path()));
    assert_eq!(summary(a.path())["config_hash"], summary(b.path())["config_hash"]);
    assert_ne!(summary(a.path())["config_hash"], summary(c.path())["config_hash"]);
    assert_eq!(summary(a.path())["seed"], 11);
}

#[test]
fn flat_variations_pass_with_orders() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(kvc("variations", &config("flat.json"), out.path(), &[]), EXIT_PASS);
    let text = std::fs::read_to_string(out.path().join("variations.csv")).unwrap();
    assert!(text.lines().next().unwrap().ends_with(",order"));
    let rows = csv_rows(&out.path().join("variations.csv"));
    let zero: Vec<_> = rows.iter().filter(|r| r[0].ends_with("@zero")).collect();
    assert!(zero.len() >= 12);
    assert!(zero.iter().all(|r| r[3].parse::<f64>().unwrap() == 0.0));
    for r in rows.iter().filter(|r| !r[6].is_empty()) {
        assert!(r[6] == "inf" || r[6].parse::<f64>().unwrap() >= 1.9, "{r:?}");
    }
    assert!(rows.iter().any(|r| r[0] == "thm_a_vs_part_a@u0"));
}

#[test]
fn homothety_flow_passes() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(kvc("flow", &config("flat.json"), out.path(), &[]), EXIT_PASS);
    let rows = csv_rows(&out.path().join("flow.csv"));
    let h = rows.iter().find(|r| r[0] == "homothety").unwrap();
    assert!(h[3].parse::<f64>().unwrap() <= 1e-10 && h[5] == "true");
    let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(out.path().join("trajectory/trajectory.json")).unwrap()).unwrap();
    assert_eq!(manifest["times"].as_array().unwrap().len(), 11);
    assert_eq!(manifest["config_hash"], summary(out.path())["config_hash"]);
    let series = std::fs::read_to_string(out.path().join("flow_series.csv")).unwrap();
    assert_eq!(series.lines().count(), 12);
}

#[test]
fn perturbed_flow_reports_the_sign_findings() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(kvc("flow", &config("perturbed_flow.json"), out.path(), &[]), EXIT_CHECK_FAILURE);
    let failures: Vec<String> =
        summary(out.path())["failures"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    assert_eq!(failures, ["constraint_t0", "evol_b_refined"]);
    let rows = csv_rows(&out.path().join("flow.csv"));
    for id in ["constraint_growth", "j_invariants", "ab_structure", "omega_velocity", "evol_a_refined"] {
        assert_eq!(rows.iter().find(|r| r[0] == id).unwrap()[5], "true", "{id}");
    }
}

#[test]
fn spd_loss_aborts_with_exit_3() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(kvc("flow", &config("spd_loss.json"), out.path(), &[]), EXIT_NUMERICAL);
    let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(out.path().join("trajectory/trajectory.json")).unwrap()).unwrap();
    assert!(manifest["abort"]["reason"].as_str().unwrap().contains("positive definite"));
    assert_eq!(manifest["unstable"], true);
    let n = manifest["times"].as_array().unwrap().len();
    assert!((1..51).contains(&n));
    assert!(summary(out.path())["abort"].is_string());
}

#[test]
fn binary_runs() {
    let out = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_kvc"))
        .args(["identities", "--config", config("flat.json").to_str().unwrap(), "--out", out.path().to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let status = Command::new(env!("CARGO_BIN_EXE_kvc")).args(["flow", "--config", config("spd_loss.json").to_str().unwrap(), "--out", out.path().to_str().unwrap()]).status().unwrap();
    assert_eq!(status.code(), Some(3));
}
