use std::path::PathBuf;
use std::process::Command;

use schro_cli::config::ExperimentConfig;
use schro_cli::output::result_table_csv;
use schro_cli::pipeline::{run, RunOptions};
use schro_cli::validate::desk_configs;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_elastic-schro"))
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("schro-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn empty_config_lists_missing_keys() {
    let err = ExperimentConfig::parse("").unwrap_err();
    for key in ["formulation", "dimension", "grid.m", "p.n", "time.dt", "time.t", "initial.kind"] {
        assert!(err.missing.iter().any(|m| m == key), "{key} not reported in {:?}", err.missing);
    }

    let dir = scratch("empty");
    let path = dir.join("empty.toml");
    std::fs::write(&path, "").unwrap();
    let out = bin().args(["run", "--config"]).arg(&path).arg("--out").arg(&dir).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("grid.m"), "{stderr}");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn unknown_key_is_rejected() {
    let body = schro_cli::config::preset_source("paper-6.1").unwrap().replace("[time]", "[time]\nsteps = 3");
    let err = ExperimentConfig::parse(&body).unwrap_err();
    assert!(err.invalid.iter().any(|m| m.contains("time.steps")), "{:?}", err.invalid);
}

#[test]
fn identical_configs_give_identical_tables() {
    let cfg = desk_configs().remove(2);
    let a = result_table_csv(&run(&cfg, &RunOptions::default()).unwrap());
    let b = result_table_csv(&run(&cfg, &RunOptions::default()).unwrap());
    assert_eq!(a, b);
    assert!(a.contains(&format!("# config_hash={}", cfg.hash())));
    assert!(!a.contains('\r'));
}

#[test]
fn binary_output_is_byte_stable() {
    let dir = scratch("stable");
    let mut outputs = Vec::new();
    for sub in ["a", "b"] {
        let out_dir = dir.join(sub);
        let out = bin()
            .args(["run", "--preset", "paper-6.3-spectral-row1", "--out"])
            .arg(&out_dir)
            .output()
            .unwrap();
        assert!(out.status.success());
        outputs.push(std::fs::read(out_dir.join("paper-6.3-spectral-row1.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn output_directory_from_environment() {
    let dir = scratch("env");
    let out = bin().args(["validate"]).env("SCHRO_OUT_DIR", &dir).output().unwrap();
    assert!(out.status.success());
    assert!(dir.join("validate.json").exists());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn hash_tracks_tolerance() {
    let a = ExperimentConfig::preset("paper-6.1").unwrap();
    let mut b = a.clone();
    b.compare.rel_l2 = Some(3e-2);
    assert_ne!(a.hash(), b.hash());
    let src = schro_cli::config::preset_source("paper-6.1").unwrap().replace("rel_l2 = 2e-2", "rel_l2 = 3e-2");
    assert_eq!(ExperimentConfig::parse(&src).unwrap().hash(), b.hash());
    assert_eq!(ExperimentConfig::preset("paper-6.1").unwrap().hash(), a.hash());
}

#[test]
fn strict_window_refuses_to_extend() {
    let mut cfg = desk_configs().remove(0);
    cfg.p.hi = 0.5;
    assert!(run(&cfg, &RunOptions { strict: true }).is_err());
    let out = run(&cfg, &RunOptions::default()).unwrap();
    assert!(out.report.p_window.extended);
    assert!(out.report.p_window.hi > out.report.p_star);
    assert!(!out.report.warnings.is_empty());
}

#[test]
fn mutation_fails_validation() {
    let dir = scratch("mutate");
    let out = bin().args(["validate", "--mutate", "central-wrap-sign-flip", "--out"]).arg(&dir).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("[FAIL] central difference antisymmetry"), "{stdout}");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn resources_table_columns() {
    let dir = scratch("resources");
    let out = bin()
        .args(["resources", "--formulation", "smf,staggered-vs", "--d", "3", "--epsilon", "1e-2", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.join("resources.csv")).unwrap();
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(
        lines.next().unwrap(),
        "formulation,d,r,epsilon,T,s,hmax,tau,m_H,n_query,n_gate_proxy,classical_ops_proxy,source"
    );
    let smf: Vec<&str> = lines.next().unwrap().split(',').collect();
    let gate: f64 = smf[10].parse().unwrap();
    assert_eq!(gate, (5.0 + 1.5 * 100f64.log2()) * 100.0);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn sweep_needs_three_monotone_values() {
    let dir = scratch("sweep");
    let out = bin()
        .args(["sweep", "--preset", "paper-6.3-central-row2", "--axis", "M", "--values", "32,64", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["sweep", "--preset", "paper-6.3-central-row2", "--axis", "dt", "--values", "0.004,0.002,0.001"])
        .args(["--classical-only", "--threads", "2", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.join("paper-6.3-central-row2-sweep-dt.csv")).unwrap();
    let last = csv.lines().last().unwrap();
    assert!(last.starts_with("dt,observed_order"));
    let order: f64 = last.rsplit(',').next().unwrap().parse().unwrap();
    assert!((order - 2.0).abs() < 0.2);
    std::fs::remove_dir_all(dir).unwrap();
}
