use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn majorasim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_majorasim"))
        .args(args)
        .env("MAJORASIM_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const SHORT_BRAID: &str = r#"{
  "scenario": "braid",
  "wire": {"length": 4, "hopping": 1.0, "pairing": 1.0, "chemical_potential": 0.0, "potential": 1.0},
  "wires": 2,
  "step_duration": 5.0,
  "dt": 0.05,
  "sample_stride": 10
}"#;

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn braid_writes_trajectory_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "b.json", SHORT_BRAID);
    let out = tmp.path().join("run");
    let o = majorasim(&["braid", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(
        header,
        "time,segment_index,step_label,phi,iGL1GR1,iGL2GR2,iGL2GR1,iGL1GR2,gap,purity_residual,total_parity"
    );
    let s = summary(&out);
    assert_eq!(s["scenario"], "braid");
    assert_eq!(s["consistent"], true);
    assert_eq!(s["word"]["time_order"], "s1");
    assert_eq!(s["endpoints"].as_array().unwrap().len(), 4);
}

#[test]
fn output_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "b.json", SHORT_BRAID);
    let runs: Vec<Vec<u8>> = ["one", "two"]
        .iter()
        .map(|d| {
            let out = tmp.path().join(d);
            let o = majorasim(&["braid", "--config", &cfg, "--out", out.to_str().unwrap()]);
            assert!(o.status.success());
            fs::read(out.join("trajectory.csv")).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn unknown_key_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "b.json",
        r#"{"scenario": "deutsch-jozsa", "oracle": "g1", "oracel": "g2"}"#,
    );
    let o = majorasim(&[
        "deutsch-jozsa",
        "--config",
        &cfg,
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("oracel"));
}

#[test]
fn scenario_must_match_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "b.json",
        r#"{"scenario": "deutsch-jozsa", "oracle": "g1"}"#,
    );
    let o = majorasim(&[
        "spectrum",
        "--config",
        &cfg,
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_config_fails() {
    let o = majorasim(&["braid", "--config", "/nonexistent/config.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn non_topological_wires_fail_cleanly() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "b.json",
        &SHORT_BRAID.replace(
            r#""chemical_potential": 0.0"#,
            r#""chemical_potential": 3.0"#,
        ),
    );
    let o = majorasim(&[
        "braid",
        "--config",
        &cfg,
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("zero modes"));
}

#[test]
fn sweep_fans_out_into_labelled_directories() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "dj.json",
        r#"{"scenario": "deutsch-jozsa", "oracle": "g0"}"#,
    );
    let out = tmp.path().join("sweep");
    let o = majorasim(&[
        "deutsch-jozsa",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--sweep",
        "oracle=g0,g1,g2,g3",
        "--sweep",
        "mode=fock,gaussian",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut dirs: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    dirs.sort();
    assert_eq!(dirs.len(), 8, "{dirs:?}");
    for d in dirs {
        let s = summary(&out.join(&d));
        let constant = d.contains("g0");
        let verdict = if constant { "constant" } else { "balanced" };
        assert_eq!(s["details"]["verdict"], verdict, "{d}");
        assert_eq!(s["predictions_pass"], true, "{d}");
    }
}

#[test]
fn spectrum_reports_gap_and_profiles() {
    let tmp = tempfile::tempdir().unwrap();
    let preset = concat!(env!("CARGO_MANIFEST_DIR"), "/presets/spectrum_ideal.json");
    let out = tmp.path().join("sp");
    let o = majorasim(&[
        "spectrum",
        "--config",
        preset,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let s = summary(&out);
    assert_eq!(
        s["details"]["min_gap_per_step"].as_array().unwrap().len(),
        4
    );
    let profiles = fs::read_to_string(out.join("zero_modes.csv")).unwrap();
    assert_eq!(profiles.lines().count(), 1 + 4 * 12);
}
