use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_oqc");

fn oqc(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn oqc")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|l| l.split(',').nth(k).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn rds_run_writes_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "rds.json",
        r#"{"backend":"rds","parameters":{"stride":32}}"#,
    );
    let out = dir.path().join("traj.csv");
    let o = oqc(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("z,re_a1,im_a1,re_a2,im_a2,re_a3,im_a3,manley_rowe\n"));
    // 100 domains × 32 steps, every 32nd point plus z = 0.
    assert_eq!(text.lines().count(), 1 + 101);
    let mr = column(&text, "manley_rowe");
    assert!(mr.iter().all(|m| (m - mr[0]).abs() < 1e-8 * mr[0]));
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        r#"{"backend":"rds","parameters":{"kapa":1.0}}"#,
    );
    let o = oqc(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kapa"));
    assert!(o.stdout.is_empty());
}

#[test]
fn zero_coupling_calibration_fails_with_physics_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "k0.json",
        r#"{"backend":"rds","parameters":{"kappa_a":0.0,"gate":"cnot"}}"#,
    );
    let o = oqc(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("calibration failure"), "{}", stderr(&o));
}

#[test]
fn sweep_count_one_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.json",
        r#"{"backend":"stats","sweep":{"parameter":"r","start":0.0,"stop":1.0,"count":1}}"#,
    );
    assert_eq!(oqc(&["sweep", "--config", &cfg]).status.code(), Some(2));
    let none = write_config(dir.path(), "n.json", r#"{"backend":"stats"}"#);
    assert_eq!(oqc(&["sweep", "--config", &none]).status.code(), Some(2));
}

#[test]
fn phase_matched_length_sweep_grows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "len.json",
        r#"{"backend":"rds","parameters":{"dk_a":0.0,"poled":false},
            "sweep":{"parameter":"length","start":0.001,"stop":0.05,"count":50}}"#,
    );
    let o = oqc(&["sweep", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let lengths = column(&text, "length");
    let eff = column(&text, "sh_efficiency");
    assert_eq!(eff.len(), 50);
    assert!(lengths.windows(2).all(|w| w[1] > w[0]));
    assert!(eff.windows(2).all(|w| w[1] > w[0]));
    // Undepleted quadratic growth: η ≈ (κA/2)²|a1|²L².
    let want = 0.25 * 0.01 * 0.05f64.powi(2);
    assert!((eff[49] - want).abs() / want < 0.01);
}

#[test]
fn mismatch_sweep_peaks_at_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "dk.json",
        r#"{"backend":"rds","parameters":{"poled":false,"length":0.01},
            "sweep":{"parameter":"dk_a","start":-2000.0,"stop":2000.0,"count":21}}"#,
    );
    let o = oqc(&["sweep", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let dk = column(&text, "dk_a");
    let eff = column(&text, "sh_efficiency");
    let best = (0..eff.len())
        .max_by(|&a, &b| eff[a].total_cmp(&eff[b]))
        .unwrap();
    assert_eq!(dk[best], 0.0);
}

#[test]
fn stats_sweep_rows_use_the_stats_layout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "st.json",
        r#"{"backend":"stats","parameters":{"alpha":[3.0,0.0]},
            "sweep":{"parameter":"r","start":0.0,"stop":0.5,"count":6}}"#,
    );
    let o = oqc(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("alpha_re,alpha_im,r,theta,meanN,varN,Q,g2\n"));
    let q = column(&text, "Q");
    assert_eq!(q[0], 0.0);
    assert!(q[1..].iter().all(|&x| x < 0.0));
}

#[test]
fn vacuum_stats_print_nan_for_undefined_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "v.json", r#"{"backend":"stats"}"#);
    let o = oqc(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .trim_end()
        .ends_with("NaN,NaN"));
}

#[test]
fn json_output_parses() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "j.json",
        r#"{"backend":"jones","parameters":{"qubits":3,"gate":"cnot","control":0,"target":2,"input":"100"},
            "output":{"format":"json"}}"#,
    );
    let o = oqc(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    // |100⟩ → |101⟩: mode 2, V.
    let lit: Vec<_> = rows
        .iter()
        .filter(|r| r["power"].as_f64().unwrap() > 0.5)
        .collect();
    assert_eq!(lit.len(), 1);
    assert_eq!(lit[0]["mode"], 2);
    assert_eq!(lit[0]["polarization"], "V");
}

#[test]
fn spin_cnot_with_zero_coupling_is_a_physics_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "j0.json",
        r#"{"backend":"spin","parameters":{"j12":0.0}}"#,
    );
    assert_eq!(oqc(&["run", "--config", &cfg]).status.code(), Some(1));
}

#[test]
fn truthtable_backend_list_is_validated() {
    assert_eq!(
        oqc(&["truthtable", "--backends", "spin,optics"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        oqc(&["truthtable", "--backends", "stats"]).status.code(),
        Some(2)
    );
    let o = oqc(&["truthtable", "--backends", "jones"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 1 + 6);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.json",
        r#"{"backend":"spin","seed":1,"output":{"format":"json"}}"#,
    );
    let o = oqc(&["run", "--config", &cfg, "--seed", "99"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["seed"], 99);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(oqc(&["run"]).status.code(), Some(2));
    assert_eq!(oqc(&["frobnicate"]).status.code(), Some(2));
    let v = oqc(&["version"]);
    assert_eq!(v.status.code(), Some(0));
    assert!(String::from_utf8(v.stdout).unwrap().starts_with("oqc "));
}
