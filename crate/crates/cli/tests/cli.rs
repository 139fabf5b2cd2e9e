use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn r3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_r3")).args(args).output().expect("r3 runs")
}

fn ok(args: &[&str]) -> Output {
    let o = r3(args);
    assert!(o.status.success(), "r3 {args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
    o
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn out_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bad_variant_is_a_usage_error() {
    let o = r3(&["reliability", "--variant", "9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn resilience_without_robustness_result_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let o = r3(&["resilience", "--out", out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn report_lists_missing_results() {
    let dir = tempfile::tempdir().unwrap();
    let o = r3(&["report", "--out", out_arg(dir.path()), "--variants", "1,2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("reliability"));
}

#[test]
fn reliability_rerun_is_byte_identical_apart_from_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["reliability", "--years", "20", "--workers", "2", "--out", out_arg(dir.path())];
    ok(&args);
    let first = std::fs::read(dir.path().join("1/reliability/result.json")).unwrap();
    let csv1 = std::fs::read(dir.path().join("1/reliability/yearly_ens.csv")).unwrap();
    ok(&args);
    assert_eq!(first, std::fs::read(dir.path().join("1/reliability/result.json")).unwrap());
    assert_eq!(csv1, std::fs::read(dir.path().join("1/reliability/yearly_ens.csv")).unwrap());
    let r = json(&dir.path().join("1/reliability/result.json"));
    assert_eq!(r["schema"], "r3.reliability/1");
    assert_eq!(r["indicators"]["n_years"], 20);
    let rows = std::fs::read_to_string(dir.path().join("1/reliability/yearly_ens.csv")).unwrap();
    assert_eq!(rows.lines().count(), 21);
}

#[test]
fn single_alpha_single_event_sweep_has_one_scenario() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["robustness", "--alphas", "2.0", "--event-buses", "7", "--out", out_arg(dir.path())]);
    let r = json(&dir.path().join("1/robustness/result.json"));
    assert_eq!(r["scenario_count"], 1);
    let csv = std::fs::read_to_string(dir.path().join("1/robustness/scenarios.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.starts_with("scenario_id,event_bus,alpha,final_sd,stage_count"));
}

#[test]
fn budget_one_closes_one_line_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    ok(&["robustness", "--alphas", "1.2", "--event-buses", "1,2,3", "--out", out]);
    ok(&["resilience", "--nc", "1", "--out", out]);
    let r = json(&dir.path().join("1/resilience/result.json"));
    let steps = r["steps"].as_array().unwrap();
    assert!(!steps.is_empty());
    assert!(steps.iter().all(|s| s["closed_lines"].as_array().unwrap().len() == 1));
    assert_eq!(steps.len(), r["initial_open_lines"].as_array().unwrap().len());
    let csv = std::fs::read_to_string(dir.path().join("1/resilience/recovery_curve.csv")).unwrap();
    assert_eq!(csv.lines().count(), steps.len() + 2);
}

#[test]
fn resilience_from_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("state.json");
    let mut status = vec![true; 38];
    status[10] = false;
    status[0] = false;
    let st = serde_json::json!({"line_status": status, "generator_status": vec![true; 32]});
    std::fs::write(&state, st.to_string()).unwrap();
    ok(&["resilience", "--state", state.to_str().unwrap(), "--limits", "thermal", "--out", out_arg(dir.path())]);
    let r = json(&dir.path().join("1/resilience/result.json"));
    assert_eq!(r["fully_restored"], true);
}

fn set_eens(out: &Path, variant: u8, eens: f64) {
    let p = out.join(format!("{variant}/reliability/result.json"));
    let mut r = json(&p);
    r["indicators"]["eens"] = eens.into();
    std::fs::write(&p, serde_json::to_string_pretty(&r).unwrap()).unwrap();
}

#[test]
fn report_deltas_against_case_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    ok(&[
        "pipeline", "--variants", "1,2", "--years", "5", "--alphas", "1.2", "--event-buses", "1,2", "--out", out,
    ]);
    set_eens(dir.path(), 1, 100.0);
    set_eens(dir.path(), 2, 90.0);
    ok(&["report", "--variants", "1,2", "--out", out]);
    let r = json(&dir.path().join("report/report.json"));
    let rows = r["rows"].as_array().unwrap();
    for key in ["delta_eens_pct", "delta_sd_pct", "delta_ens_pct"] {
        assert_eq!(rows[0][key], 0.0, "{key}");
    }
    assert!((rows[1]["delta_eens_pct"].as_f64().unwrap() - 10.0).abs() < 1e-12);
    assert_eq!(rows[1]["rank_reliability"], 1);
    assert_eq!(r["inputs"].as_array().unwrap().len(), 6);
    for f in ["table.txt", "r3_scatter.csv", "r3_scatter.svg", "sd_dispersion.svg", "recovery_curves.svg"] {
        assert!(dir.path().join("report").join(f).exists(), "{f}");
    }
}

#[test]
fn report_rejects_tampered_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    ok(&["pipeline", "--variants", "1", "--years", "3", "--alphas", "1.2", "--event-buses", "1", "--out", out]);
    let p = dir.path().join("1/robustness/manifest.json");
    let mut m = json(&p);
    m["config"]["alphas"] = serde_json::json!([9.0]);
    std::fs::write(&p, m.to_string()).unwrap();
    let o = r3(&["report", "--variants", "1", "--out", out]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("manifest hash"));
}
