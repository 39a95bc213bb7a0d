use std::fs;

use prandtl_lab::cli::{run, EXIT_CONFIG, EXIT_OK};

fn argv(args: &[&str]) -> Vec<String> {
    std::iter::once("prandtl-lab").chain(args.iter().copied()).map(String::from).collect()
}

#[test]
fn unknown_config_field_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"flow": {"catalg": "critical_shear"}}"#).unwrap();
    let out = dir.path().join("out");
    let code = run(argv(&["spectral", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]));
    assert_eq!(code, EXIT_CONFIG);
}

#[test]
fn flow_without_critical_point_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"flow": {"catalog": "monotone_exp"}}"#).unwrap();
    let out = dir.path().join("out");
    let code = run(argv(&["spectral", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]));
    assert_eq!(code, EXIT_CONFIG);
}

#[test]
fn zero_workers_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(argv(&["report", "--workers", "0", "--out", dir.path().to_str().unwrap()]));
    assert_eq!(code, EXIT_CONFIG);
}

#[test]
fn failing_inflow_needs_force() {
    let dir = tempfile::tempdir().unwrap();
    let inflow = dir.path().join("inflow.csv");
    // Reversed flow near the wall violates positivity.
    let mut text = String::from("Y,u1\n");
    for i in 0..41 {
        let y = 0.2 * i as f64;
        text.push_str(&format!("{y},{}\n", (1.0 - (-y).exp()) - 2.5 * y * y * (-y).exp()));
    }
    fs::write(&inflow, text).unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, format!(r#"{{"steady": {{"inflow": {:?}, "n_y": 41}}}}"#, inflow.to_str().unwrap())).unwrap();
    let out = dir.path().join("out");
    let base = ["steady", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    assert_eq!(run(argv(&base)), EXIT_CONFIG);
    assert!(!out.join("steady.json").exists());
    let mut forced = base.to_vec();
    forced.push("--force");
    let code = run(argv(&forced));
    if code == EXIT_OK {
        let s = fs::read_to_string(out.join("steady.json")).unwrap();
        assert!(s.contains("UNVERIFIED"));
    } else {
        // The unchecked march may stop at separation; that is a numeric failure.
        assert_eq!(code, 1);
    }
}

#[test]
fn report_without_runs_marks_everything_missing() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(argv(&["report", "--out", dir.path().to_str().unwrap()])), EXIT_OK);
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    let rows = m["criteria"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r["status"] == "missing"));
}
