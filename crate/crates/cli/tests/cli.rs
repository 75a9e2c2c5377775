//! End-to-end tests of the `tubecut` binary: spec-level reference outputs,
//! exit codes, and the sample → fit → predict file pipeline.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tubecut"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stdout);
    let line = text.lines().last().unwrap_or_default();
    serde_json::from_str(line).unwrap_or_else(|e| panic!("bad JSON `{line}`: {e}"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tubecut-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn total_prints_c0() {
    let out = run(&["total", "--n", "3", "--m", "2", "--eps", "0.5"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!((v["C0"].as_f64().unwrap() - 6.908_723_080_762_55).abs() < 1e-10);
}

#[test]
fn classify_reference_output() {
    let out = run(&["classify", "--n", "3", "--m", "2", "--eps", "0.5", "--a", "0", "--c", "0"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["domain"], "3");

    // Degenerate plane through --plane with zero alphas.
    let out = run(&["classify", "--plane", "0,0,0,1,0,0"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["domain"], "4");
    assert_eq!(v["degenerate"], true);
}

#[test]
fn monodromy_reference_output() {
    let out = run(&["monodromy", "--loop", "1,0", "--leaf", "R+"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["perm"], "(L-L+)(R-R+)");
    assert_eq!(v["leaf"][0], "R-");

    let out = run(&["monodromy", "--loop", "2,2"]);
    assert_eq!(stdout_json(&out)["perm"], "id");
}

#[test]
fn volume_quadrature_and_mc_agree() {
    let out = run(&["volume", "--a", "0", "--c", "0", "--tol", "1e-9"]);
    assert!(out.status.success());
    let quad = stdout_json(&out);
    let half = 6.908_723_080_762_55 / 2.0;
    assert!((quad["value"].as_f64().unwrap() - half).abs() < 1e-8);
    assert_eq!(quad["method"], "quadrature");

    let out = run(&[
        "volume", "--a", "0", "--c", "0", "--mc", "--samples", "200000", "--seed", "7",
    ]);
    assert!(out.status.success());
    let mc = stdout_json(&out);
    assert_eq!(mc["method"], "monte_carlo");
    let sigma = mc["error"].as_f64().unwrap();
    assert!((mc["value"].as_f64().unwrap() - half).abs() <= 4.0 * sigma);
}

#[test]
fn volume_accepts_full_plane_coefficients() {
    // α=(2,0,0), γ=(−2,0), β=3 reduces to a=1, c=1.5.
    let out = run(&["volume", "--plane", "2,0,0,-2,0,3", "--tol", "1e-8"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!((v["a"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["c"].as_f64().unwrap() - 1.5).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_2() {
    // Unknown flag.
    let out = run(&["total", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    // Even n.
    let out = run(&["total", "--n", "4"]);
    assert_eq!(out.status.code(), Some(2));
    // Malformed number.
    let out = run(&["volume", "--a", "zero", "--c", "0"]);
    assert_eq!(out.status.code(), Some(2));
    // Missing plane specification.
    let out = run(&["volume", "--tol", "1e-8"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn computation_failures_exit_1() {
    // Tangent plane is refused by the quadrature.
    let out = run(&["volume", "--a", "0", "--c", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("discriminant"), "stderr: {msg}");
}

#[test]
fn sample_fit_predict_pipeline() {
    let dir = tmp_dir("pipeline");
    let s_csv = dir.join("s.csv");
    let r_csv = dir.join("r.csv");
    let s_json = dir.join("s.json");
    let p_json = dir.join("p.json");

    // Domain-3 samples for S.
    let out = run(&[
        "sample", "--domain", "3", "--grid", "12x20", "--a-range", "0:1.4",
        "--c-range", "-0.95:0.95", "--tol", "1e-9", "--out", s_csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout_json(&out)["written"].as_u64().unwrap() > 40);

    // Domain-2r samples for P. A dense offset grid keeps enough distinct c
    // values inside the per-slope windows for the degree-10 fit.
    let out = run(&[
        "sample", "--domain", "2r", "--grid", "20x48", "--a-range", "0:3.5",
        "--c-range", "0.2:4.2", "--tol", "1e-9", "--out", r_csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // Fit S, then P through the S model.
    let out = run(&[
        "fit", "--input", s_csv.to_str().unwrap(), "--target", "S",
        "--deg-a", "4", "--deg-c", "3", "--out", s_json.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s_info = stdout_json(&out);
    assert!(s_info["residual_rms"].as_f64().unwrap() < 1e-9);

    let out = run(&[
        "fit", "--input", r_csv.to_str().unwrap(), "--target", "P",
        "--deg-a", "14", "--deg-c", "10", "--s-model", s_json.to_str().unwrap(),
        "--out", p_json.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // Predict on a domain-2r point and compare against a direct volume.
    let out = run(&[
        "predict", "--models",
        &format!("{},{}", s_json.display(), p_json.display()),
        "--a", "0.4", "--c", "1.0",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let pred = stdout_json(&out);
    assert_eq!(pred["domain"], "2r");
    let out = run(&["volume", "--a", "0.4", "--c", "1.0", "--tol", "1e-9"]);
    let direct = stdout_json(&out)["value"].as_f64().unwrap();
    let best = pred["candidates"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| (v.as_f64().unwrap() - direct).abs())
        .fold(f64::INFINITY, f64::min);
    assert!(best < 1e-4, "prediction residual {best}");

    // P fit without --s-model is a usage error.
    let out = run(&[
        "fit", "--input", r_csv.to_str().unwrap(), "--target", "P",
        "--deg-a", "4", "--deg-c", "4",
    ]);
    assert_eq!(out.status.code(), Some(2));

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn certify_monodromy_only_writes_report() {
    let dir = tmp_dir("certify");
    let cfg_path = dir.join("config.json");
    let report_path = dir.join("report.json");
    std::fs::write(
        &cfg_path,
        r#"{
            "sections": {
                "oracle": false, "symmetry": false, "boundaries": false,
                "fits": false, "prediction": false, "monodromy": true
            }
        }"#,
    )
    .unwrap();
    let out = run(&[
        "certify",
        "--config",
        cfg_path.to_str().unwrap(),
        "--report",
        report_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = stdout_json(&out);
    assert_eq!(summary["fail"], 0);
    assert_eq!(summary["error"], 0);
    assert!(summary["pass"].as_u64().unwrap() >= 4);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert!(report["timestamp"].is_string());
    assert!(report["checks"].as_array().unwrap().len() >= 4);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn pretty_mode_is_line_oriented() {
    let out = run(&["--pretty", "total"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("C0"));
    assert!(!text.trim_start().starts_with('{'));
}

#[test]
fn threads_flag_does_not_change_results() {
    let args = [
        "volume", "--a", "0.7", "--c", "0.4", "--mc", "--samples", "100000", "--seed", "11",
    ];
    let one = bin().args(["--threads", "1"]).args(args).output().unwrap();
    let many = bin().args(["--threads", "8"]).args(args).output().unwrap();
    assert!(one.status.success() && many.status.success());
    assert_eq!(
        stdout_json(&one)["value"].as_f64().unwrap().to_bits(),
        stdout_json(&many)["value"].as_f64().unwrap().to_bits()
    );
}
