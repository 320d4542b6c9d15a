use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use oblique_core::matkit::eigenvalues;
use oblique_core::stability::omega_1d;
use oblique_core::swe::{advection_matrices, viscosity_matrices, SweParams};
use serde_json::Value;

fn oblique(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oblique"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn dispersion_paper_regimes() {
    let dir = tempfile::tempdir().unwrap();
    let o = oblique(&["dispersion", "--out", s(dir.path()), "--eps", "1", "--eps", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = json(&dir.path().join("summary.json"));
    let unstable = &summary[0];
    assert!((unstable["max_sigma"].as_f64().unwrap() - 0.4).abs() < 0.02);
    assert!((unstable["argmax_k"].as_f64().unwrap() - 1.45).abs() < 0.1);
    let upper = unstable["positive_interval"][1].as_f64().unwrap();
    assert!((2.2..2.4).contains(&upper), "{upper}");
    assert!(summary[1]["positive_interval"].is_null());

    let manifest = json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["command"], "dispersion");
    assert_eq!(manifest["config"]["eps"], serde_json::json!([1.0, 5.0]));
    let files: Vec<&str> = manifest["files"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    assert!(files.contains(&"growth_eps1_gamma0.5.csv"));
    for f in files {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn dispersion_gamma_one_matches_the_axis_operator() {
    let dir = tempfile::tempdir().unwrap();
    let o = oblique(&["dispersion", "--out", s(dir.path()), "--gamma", "1", "--k-points", "50"]);
    assert_eq!(code(&o), 0);
    let params = SweParams::default();
    let (a, _) = advection_matrices(&params);
    let (c, _) = viscosity_matrices(&params);
    let csv = fs::read_to_string(dir.path().join("growth_eps1_gamma1.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let (k, sigma) = line.split_once(',').unwrap();
        let k: f64 = k.parse().unwrap();
        let want = eigenvalues(&omega_1d(&a, &c, k).unwrap()).unwrap().abscissa();
        assert_eq!(sigma.parse::<f64>().unwrap(), want, "k = {k}");
    }
}

#[test]
fn perturb_identity_viscosity() {
    let dir = tempfile::tempdir().unwrap();
    let o = oblique(&["perturb", "--out", s(dir.path()), "--a", "0,1;2,0", "--c", "1,0;0,1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = json(&dir.path().join("summary.json"));
    assert!(summary["max_discrepancy"].as_f64().unwrap() < 1e-14);
    let csv = fs::read_to_string(dir.path().join("corrections.csv")).unwrap();
    for line in csv.lines().skip(1).filter(|l| !l.starts_with("fd_oracle")) {
        let re: f64 = line.split(',').nth(4).unwrap().parse().unwrap();
        assert!((re - 1.0).abs() < 1e-12, "{line}");
    }
}

#[test]
fn perturb_paper_pair_is_persisted() {
    let dir = tempfile::tempdir().unwrap();
    let o = oblique(&["perturb", "--out", s(dir.path()), "--swe-pair", "ad"]);
    assert_eq!(code(&o), 0);
    let summary = json(&dir.path().join("summary.json"));
    assert_eq!(summary["n"], 3);
    assert_eq!(summary["methods"].as_array().unwrap().len(), 4);
}

#[test]
fn perturb_input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"a": [[1, 2], [3]], "c": [[1, 0], [0, 1]]}"#).unwrap();
    let o = oblique(&["perturb", "--out", s(&dir.path().join("o")), "--config", s(&cfg)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.json"));

    let repeated = oblique(&["perturb", "--out", s(dir.path()), "--a", "1,0;0,1", "--c", "1,0;0,1"]);
    assert_eq!(code(&repeated), 2);
    assert!(String::from_utf8_lossy(&repeated.stderr).contains("not distinct"));

    let missing_out = oblique(&["perturb"]);
    assert_eq!(code(&missing_out), 2);
}

#[test]
fn conjecture_paper_cases_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan");
    let o = oblique(&["conjecture", "--out", s(&out), "--k-points", "300", "--gamma-points", "11"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = json(&out.join("summary.json"));
    assert_eq!(summary["cases"], 2);
    let eps1 = json(&out.join("cases/swe_eps1.json"));
    let eps5 = json(&out.join("cases/swe_eps5.json"));
    assert_eq!(eps5["four_operator"]["verdict"], "consistent");
    // the axis operators are all stable while the oblique direction is not
    assert_eq!(eps1["four_operator"]["verdict"], "COUNTEREXAMPLE");
    assert_eq!(summary["counterexamples"], serde_json::json!(["swe_eps1"]));

    let replay = dir.path().join("replay");
    let o = oblique(&[
        "conjecture",
        "--out",
        s(&replay),
        "--config",
        s(&out.join("counterexamples/swe_eps1.json")),
    ]);
    assert_eq!(code(&o), 0);
    let again = json(&replay.join("cases/explicit.json"));
    assert_eq!(again["four_operator"]["verdict"], "COUNTEREXAMPLE");
    assert_eq!(again["four_operator"]["witness"], eps1["four_operator"]["witness"]);
}

#[test]
fn conjecture_random_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = oblique(&[
            "--threads", "2", "conjecture", "--out", s(&out), "--random", "5", "--seed", "11", "--k-points", "100",
            "--gamma-points", "6",
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let (a, b) = (run("a"), run("b"));
    for f in ["summary.json", "manifest.json", "cases/seed11.json", "cases/seed15.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_eq!(json(&a.join("summary.json"))["cases"], 5);
}

fn small_sim(out: &Path, extra: &[&str]) -> Output {
    sim_until(out, "1", "0.5,1", extra)
}

fn sim_until(out: &Path, t_final: &str, snapshots: &str, extra: &[&str]) -> Output {
    let mut args = vec![
        "simulate", "--out", s(out), "--nx", "40", "--ny", "40", "--x-min", "-8", "--x-max", "8", "--y-min", "-8",
        "--y-max", "8", "--t-final", t_final, "--snapshot-times", snapshots,
    ];
    args.extend_from_slice(extra);
    oblique(&args)
}

#[test]
fn simulate_writes_a_reproducible_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = small_sim(&out, &["--eps", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = json(&out.join("manifest.json"));
    assert_eq!(manifest["termination"]["status"], "completed");
    assert_eq!(manifest["config"]["eps"], 5.0);
    assert!(manifest["results"]["relative_mass_drift"].as_f64().unwrap() < 1e-12);
    assert!(
        manifest["results"]["linf_final"].as_f64().unwrap() < manifest["results"]["linf_initial"].as_f64().unwrap()
    );
    for name in ["h_t0.500000.csv", "q_t1.000000.csv", "p_t1.000000.csv"] {
        assert!(out.join("snapshots").join(name).exists(), "{name}");
    }
    let header = fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    assert!(header.starts_with("t,linf,l2,hmax,hmin,kx_dom,ky_dom,mode_energy\n"));

    // the manifest alone reproduces the run
    let replay = dir.path().join("replay");
    let o = oblique(&["simulate", "--out", s(&replay), "--config", s(&out.join("manifest.json"))]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        fs::read(out.join("diagnostics.csv")).unwrap(),
        fs::read(replay.join("diagnostics.csv")).unwrap()
    );
    assert_eq!(
        fs::read(out.join("snapshots/h_t1.000000.csv")).unwrap(),
        fs::read(replay.join("snapshots/h_t1.000000.csv")).unwrap()
    );
}

#[test]
fn flags_override_config_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"eps": 5.0, "mode": "nonlinear", "cfl_number": 0.3}"#).unwrap();
    let out = dir.path().join("run");
    let o = small_sim(&out, &["--config", s(&cfg), "--eps", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = json(&out.join("manifest.json"));
    assert_eq!(manifest["config"]["eps"], 2.0);
    assert_eq!(manifest["config"]["mode"], "nonlinear");
    assert_eq!(manifest["config"]["cfl_number"], 0.3);
}

#[test]
fn simulate_blow_up_exits_1_with_partial_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = sim_until(&out, "200", "1", &["--fixed-dt", "0.5"]);
    assert_eq!(code(&o), 1);
    let manifest = json(&out.join("manifest.json"));
    assert_eq!(manifest["termination"]["status"], "blow_up");
    assert!(out.join("diagnostics.csv").exists());
}

#[test]
fn simulate_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = small_sim(&dir.path().join("a"), &["--cfl-number", "1.5"]);
    assert_eq!(code(&o), 2);
    let o = small_sim(&dir.path().join("b"), &["--reconstruction", "characteristic"]);
    assert_eq!(code(&o), 2);
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"epsilon": 1.0}"#).unwrap();
    let o = small_sim(&dir.path().join("c"), &["--config", s(&cfg)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn modes_on_a_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    assert_eq!(code(&small_sim(&out, &["--snapshot-format", "bin"])), 0);
    let snap = out.join("snapshots/h_t1.000000.bin");
    let report_dir = dir.path().join("modes");
    let o = oblique(&["modes", s(&snap), "--out", s(&report_dir)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&report_dir.join("modes.json"));
    assert_eq!(report["t"], 1.0);
    let angle = report["mode"]["angle_deg"].as_f64().unwrap();
    assert!((0.0..180.0).contains(&angle));
    assert!(report_dir.join("manifest.json").exists());

    let o = oblique(&["modes", s(&dir.path().join("missing.csv"))]);
    assert_eq!(code(&o), 2);
}
