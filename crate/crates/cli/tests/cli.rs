//! End-to-end tests of the binary: exit-code taxonomy, pipeline round
//! trips, determinism, and the verification subcommand.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_padic-wavelets"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, content: &str) {
    std::fs::write(dir.join(name), content).unwrap();
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

const OMEGA: &str =
    r#"{"prime": 2, "pieces": [{"center": "0/2^0", "radius_exp": 0, "value": [1.0, 0.0]}]}"#;

#[test]
fn analyze_writes_deterministic_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "omega.json", OMEGA);
    let out = run(
        &[
            "analyze",
            "--input",
            "omega.json",
            "--window",
            "2,0",
            "--out",
            "a.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let csv1 = read(dir.path(), "a.csv");
    assert!(csv1.starts_with("gamma,j,n_num,n_den_exp,re,im\n"));
    assert_eq!(csv1.lines().count(), 4, "header plus the 3 window rows");
    assert!(csv1.contains("7.0710678118654757e-1"));
    assert!(csv1.contains("5.0000000000000000e-1"));
    let summary: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "a.summary.json")).unwrap();
    assert_eq!(summary["scaling"][0], 0.5);
    assert!(summary["parseval_defect"].as_f64().unwrap() < 1e-12);

    // byte-identical on a second run
    let out = run(
        &[
            "analyze",
            "--input",
            "omega.json",
            "--window",
            "2,0",
            "--out",
            "b.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert_eq!(csv1, read(dir.path(), "b.csv"));
}

#[test]
fn analyze_then_synthesize_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    // two pieces with irrational-phase values
    let f = r#"{"prime": 2, "pieces": [
        {"center": "0/2^0", "radius_exp": 1, "value": [0.25, -1.5]},
        {"center": "3/2^1", "radius_exp": 1, "value": [0.0, 0.75]}
    ]}"#;
    write(dir.path(), "f.json", f);
    assert!(run(
        &["analyze", "--input", "f.json", "--window", "2,2", "--out", "c.csv"],
        dir.path()
    )
    .status
    .success());
    assert!(run(
        &[
            "synthesize",
            "--coeffs",
            "c.csv",
            "--summary",
            "c.summary.json",
            "--out",
            "back.json"
        ],
        dir.path()
    )
    .status
    .success());
    let original: serde_json::Value = serde_json::from_str(f).unwrap();
    let back: serde_json::Value = serde_json::from_str(&read(dir.path(), "back.json")).unwrap();
    // every original piece must be reproduced within 1e-12; dust pieces
    // below that threshold may appear alongside
    for piece in original["pieces"].as_array().unwrap() {
        let found = back["pieces"]
            .as_array()
            .unwrap()
            .iter()
            .find(|q| q["center"] == piece["center"] && q["radius_exp"] == piece["radius_exp"])
            .unwrap_or_else(|| panic!("missing piece {piece}"));
        for i in 0..2 {
            let a = piece["value"][i].as_f64().unwrap();
            let b = found["value"][i].as_f64().unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }
    for piece in back["pieces"].as_array().unwrap() {
        let is_original = original["pieces"]
            .as_array()
            .unwrap()
            .iter()
            .any(|q| q["center"] == piece["center"] && q["radius_exp"] == piece["radius_exp"]);
        if !is_original {
            let re = piece["value"][0].as_f64().unwrap();
            let im = piece["value"][1].as_f64().unwrap();
            assert!((re * re + im * im).sqrt() < 1e-12, "non-dust extra piece");
        }
    }
}

#[test]
fn malformed_json_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.json", "{ not json");
    let out = run(
        &["analyze", "--input", "bad.json", "--out", "x.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));

    // overlapping pieces are a schema violation too
    let overlapping = r#"{"prime": 2, "pieces": [
        {"center": "0/2^0", "radius_exp": 0, "value": [1.0, 0.0]},
        {"center": "0/2^0", "radius_exp": 1, "value": [2.0, 0.0]}
    ]}"#;
    write(dir.path(), "overlap.json", overlapping);
    let out = run(
        &["analyze", "--input", "overlap.json", "--out", "x.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn window_violation_exits_3_and_names_the_ball() {
    let dir = tempfile::tempdir().unwrap();
    let wide =
        r#"{"prime": 2, "pieces": [{"center": "0/2^0", "radius_exp": -3, "value": [1.0, 0.0]}]}"#;
    write(dir.path(), "wide.json", wide);
    let out = run(
        &[
            "analyze",
            "--input",
            "wide.json",
            "--window",
            "1,1",
            "--out",
            "x.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("B(0/2^0, -3)"), "stderr: {stderr}");
}

#[test]
fn spectral_mode_on_nonzero_mean_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "omega.json", OMEGA);
    let out = run(
        &[
            "dalpha",
            "--input",
            "omega.json",
            "--mode",
            "spectral",
            "--window",
            "2,0",
            "--out",
            "d.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn dalpha_direct_evaluates_the_constant_value() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "omega.json", OMEGA);
    let out = run(
        &[
            "dalpha",
            "--input",
            "omega.json",
            "--mode",
            "direct",
            "--alpha",
            "1.0",
            "--points",
            "0/2^0,1/2^0,5/2^0",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for line in text.lines().skip(1) {
        let re: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((re - 2.0 / 3.0).abs() < 1e-12, "{line}");
    }
}

#[test]
fn dalpha_spectral_doubles_the_mother_wavelet() {
    let dir = tempfile::tempdir().unwrap();
    let psi = r#"{"prime": 2, "pieces": [
        {"center": "0/2^0", "radius_exp": 1, "value": [1.0, 0.0]},
        {"center": "1/2^0", "radius_exp": 1, "value": [-1.0, 0.0]}
    ]}"#;
    write(dir.path(), "psi.json", psi);
    let out = run(
        &[
            "dalpha", "--input", "psi.json", "--mode", "spectral", "--alpha", "1.0", "--window",
            "1,1", "--out", "d.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let csv = read(dir.path(), "d.csv");
    // the only nonzero row is (gamma=0, j=1, n=0) scaled to 2
    let row: Vec<&str> = csv
        .lines()
        .find(|l| l.starts_with("0,1,0,0"))
        .unwrap()
        .split(',')
        .collect();
    let re: f64 = row[4].parse().unwrap();
    assert!((re - 2.0).abs() < 1e-12);
}

#[test]
fn monna_output_is_exact_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "monna",
        "--points",
        "1/2^1,-1/2^1",
        "--balls",
        "5/2^1:0",
        "--sections",
        "7/4",
    ];
    let a = run(&args, dir.path());
    let b = run(&args, dir.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["points"][0]["rho"], "1");
    assert_eq!(v["points"][1]["rho"], "2");
    // 5/2 + Z_2 = 1/2 + Z_2 canonically
    assert_eq!(v["balls"][0]["center"], "1/2^1");
    assert_eq!(v["balls"][0]["interval_left"], "1");
    // digit reflection: 7/4 = 1 + 1/2 + 1/4 pulls back to 2 + 1 + 1/2
    assert_eq!(v["sections"][0]["preimage"], "7/2^1");
}

#[test]
fn bridge_pullback_of_haar_wavelet_is_the_p_adic_mother() {
    let dir = tempfile::tempdir().unwrap();
    let step = r#"{"K": 0, "M": 1, "values": [[1.0, 0.0], [-1.0, 0.0]]}"#;
    write(dir.path(), "step.json", step);
    let out = run(
        &["bridge", "--mode", "pullback", "--input", "step.json"],
        dir.path(),
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["prime"], 2);
    assert_eq!(v["pieces"][0]["center"], "0/2^0");
    assert_eq!(v["pieces"][0]["radius_exp"], 1);
    assert_eq!(v["pieces"][0]["value"][0], 1.0);
    assert_eq!(v["pieces"][1]["center"], "1/2^0");
    assert_eq!(v["pieces"][1]["value"][0], -1.0);
}

#[test]
fn bridge_haar_analyze_then_synthesize_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let step = r#"{"K": 1, "M": 1, "values": [[0.5, 0.25], [-1.0, 0.0], [2.0, -0.5], [0.0, 1.0]]}"#;
    write(dir.path(), "step.json", step);
    assert!(run(
        &[
            "bridge",
            "--mode",
            "haar-analyze",
            "--input",
            "step.json",
            "--out",
            "h.csv"
        ],
        dir.path()
    )
    .status
    .success());
    let out = run(
        &[
            "bridge",
            "--mode",
            "haar-synthesize",
            "--coeffs",
            "h.csv",
            "--summary",
            "h.summary.json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let original: serde_json::Value = serde_json::from_str(step).unwrap();
    for (a, b) in v["values"]
        .as_array()
        .unwrap()
        .iter()
        .zip(original["values"].as_array().unwrap())
    {
        for i in 0..2 {
            let x = a[i].as_f64().unwrap();
            let y = b[i].as_f64().unwrap();
            assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn bridge_pushforward_inverts_pullback() {
    let dir = tempfile::tempdir().unwrap();
    let step = r#"{"K": 1, "M": 0, "values": [[1.0, 0.0], [3.0, -1.0]]}"#;
    write(dir.path(), "step.json", step);
    assert!(run(
        &[
            "bridge",
            "--mode",
            "pullback",
            "--input",
            "step.json",
            "--out",
            "g.json"
        ],
        dir.path()
    )
    .status
    .success());
    let out = run(
        &[
            "bridge",
            "--mode",
            "pushforward",
            "--input",
            "g.json",
            "--window",
            "1,0",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let original: serde_json::Value = serde_json::from_str(step).unwrap();
    assert_eq!(v["values"], original["values"]);
}

#[test]
fn verify_passes_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "verify",
            "--only",
            "mother-eigenvalue,parseval-indicator,hoelder-bound",
            "--out",
            "report.json",
        ])
        .current_dir(dir.path())
        .env("PADIC_WAVELET_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let report: serde_json::Value = serde_json::from_str(&read(dir.path(), "report.json")).unwrap();
    assert_eq!(report["all_passed"], true);
    assert_eq!(report["properties"].as_array().unwrap().len(), 3);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.matches("PASS").count(), 3);
}

#[test]
fn verify_with_extra_prime_and_alpha_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "verify",
            "--prime",
            "5",
            "--alpha",
            "0.5",
            "--only",
            "mother-eigenvalue,eigenvalue-series,window-eigenvalues",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
}

#[test]
fn verify_detects_injected_eigenvalue_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "verify",
            "--only",
            "window-eigenvalues",
            "--perturb-eigenvalue",
            "1e-3",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("FAIL"));
}

#[test]
fn verify_list_names_all_properties() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--list"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for name in [
        "mother-eigenvalue",
        "orthonormality",
        "window-eigenvalues",
        "parseval-indicator",
        "eigenvalue-series",
        "hoelder-bound",
        "measure-preservation",
        "haar-correspondence",
        "spectral-direct",
        "tail-closed-form",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
    // unknown names are input errors
    let out = run(&["verify", "--only", "no-such-check"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_function_analyzes_to_zero_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "zero.json", r#"{"prime": 2, "pieces": []}"#);
    let out = run(
        &[
            "analyze",
            "--input",
            "zero.json",
            "--window",
            "1,1",
            "--out",
            "z.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let csv = read(dir.path(), "z.csv");
    for line in csv.lines().skip(1) {
        let re: f64 = line.split(',').nth(4).unwrap().parse().unwrap();
        assert_eq!(re, 0.0);
    }
    let summary: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "z.summary.json")).unwrap();
    assert_eq!(summary["parseval_defect"], 0.0);
}
