use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclic-weingarten")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn verify_pseudohyperbolic_passes() {
    let o = run(&["verify", "--surface", "pseudohyperbolic", "--r", "2", "--a", "1", "--b", "-0.25", "--c", "0.4375"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["status"], "pass");
}

#[test]
fn wrong_coefficients_fail_with_one() {
    let o = run(&["verify", "--surface", "pseudohyperbolic", "--r", "2", "--a", "1", "--b", "-0.25", "--c", "0.5"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("weingarten-residual"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&["verify", "--surface", "pseudohyperbolic", "--bogus"])), 2);
    assert_eq!(code(&run(&["verify"])), 2);
    assert_eq!(code(&run(&["verify", "--surface", "pseudohyperbolic", "--nu", "1"])), 2);
    assert_eq!(code(&run(&["verify", "--surface", "pseudohyperbolic", "--umin", "2", "--umax", "1"])), 2);
    assert_eq!(code(&run(&["mesh", "--surface", "pseudohyperbolic"])), 2);
    assert_eq!(code(&run(&["verify", "--config", "/nonexistent/run.json"])), 2);
}

#[test]
fn construction_failures_exit_three() {
    assert_eq!(code(&run(&["verify", "--surface", "pseudohyperbolic", "--r", "-1"])), 3);
    let riemann = ["--surface", "riemann-maximal", "--r0p", "0", "--umin", "-3", "--umax", "3"];
    assert_eq!(code(&run(&[&["verify"][..], &riemann].concat())), 3);
    assert_eq!(code(&run(&[&["curvature"][..], &riemann].concat())), 3);
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let report = dir.path().join("report.json");
    fs::write(
        &cfg,
        format!(
            r#"{{"surface":{{"family":"pseudohyperbolic","r":2}},"coeffs":{{"a":1,"b":-0.25,"c":0.5}},"nu":12,"report":{:?}}}"#,
            report
        ),
    )
    .unwrap();
    let o = run(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(report.exists());
    let o = run(&["verify", "--config", cfg.to_str().unwrap(), "--c", "0.4375"]);
    assert_eq!(code(&o), 0);
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["environment"]["grid"][0], 12);

    fs::write(&cfg, r#"{"surface":{"family":"pseudohyperbolic","r":2},"colour":"red"}"#).unwrap();
    assert_eq!(code(&run(&["verify", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn curvature_at_a_point() {
    let o = run(&["curvature", "--surface", "pseudohyperbolic", "--r", "2", "--u", "1", "--v", "0.5"]);
    assert_eq!(code(&o), 0);
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let nodes = r["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 1);
    assert!((nodes[0]["K"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!((nodes[0]["H"].as_f64().unwrap().abs() - 0.5).abs() < 1e-12);
}

#[test]
fn residual_and_coeffs_emit_json() {
    let o = run(&["residual", "--surface", "riemann-maximal", "--epsilon", "-1"]);
    assert_eq!(code(&o), 0);
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r["weingarten"].as_f64().unwrap() < 1e-6);

    let o = run(&["coeffs", "--surface", "riemann-maximal", "--a", "1", "--b", "0", "--c", "0"]);
    assert_eq!(code(&o), 0);
    assert!(serde_json::from_slice::<serde_json::Value>(&o.stdout).is_ok());
    assert_eq!(code(&run(&["coeffs", "--surface", "riemann-maximal", "--format", "obj"])), 2);
}

#[test]
fn mesh_export_obj_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("s.obj");
    let o = run(&[
        "mesh",
        "--surface",
        "pseudohyperbolic",
        "--r",
        "2",
        "--nu",
        "10",
        "--nv",
        "10",
        "--out",
        obj.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&obj).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 100);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 162);

    let csv = dir.path().join("s.csv");
    let o = run(&[
        "mesh",
        "--surface",
        "flat-family",
        "--kind",
        "timelike",
        "--nu",
        "4",
        "--nv",
        "5",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("u,v,x1,x2,x3,"));
    assert_eq!(text.lines().count(), 21);

    let bad = dir.path().join("missing").join("s.obj");
    assert_eq!(code(&run(&["mesh", "--surface", "pseudohyperbolic", "--out", bad.to_str().unwrap()])), 2);
}

#[test]
fn verify_is_byte_identical() {
    let args = ["verify", "--surface", "frenet-spacelike", "--nu", "8", "--nv", "8"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}
