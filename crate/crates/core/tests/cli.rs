use std::path::Path;
use std::process::{Command, Output};

fn mdiew(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdiew"))
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn verify_passes_with_defaults() {
    let out = mdiew(&["verify", "--trials", "40"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("invariants hold"));
}

#[test]
fn verify_names_the_reconstruction_invariant_under_beta_fault() {
    let out = mdiew(&["verify", "--trials", "10", "--inject-beta-fault", "0.01"]);
    assert_eq!(out.status.code(), Some(1));
    let first = stderr(&out).lines().find(|l| l.starts_with("invariant failed")).unwrap().to_string();
    assert_eq!(first, "invariant failed: witness reconstruction from decomposition");
}

#[test]
fn verify_writes_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = mdiew(&["verify", "--trials", "10", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["suites"].as_array().unwrap().len(), 12);
}

fn line_value(text: &str, prefix: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(prefix)).unwrap();
    let v = line[prefix.len()..].trim();
    if v == "inf" {
        f64::INFINITY
    } else {
        v.parse().unwrap()
    }
}

#[test]
fn threshold_white_noise() {
    let out = mdiew(&["threshold", "white", "--p1", "0.9", "--p2", "0.8"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let expected = 1.0 / (3.0 * 0.9 * 0.8);
    assert!((line_value(&text, "closed form:") - expected).abs() < 1e-9);
    assert!((line_value(&text, "numeric:") - expected).abs() < 1e-6);
    assert!(text.contains("detectable:  true"));
}

#[test]
fn threshold_amplitude_damping_and_pauli() {
    let out = mdiew(&["threshold", "amplitude-damping", "--eps1", "0.2", "--eps2", "0.3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let out = mdiew(&["threshold", "pauli", "--i", "1", "--j", "3", "--p1", "0.9", "--p2", "0.95"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let out = mdiew(&["threshold", "pauli", "--i", "2", "--j", "2", "--p1", "0.2", "--p2", "0.8"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("detectable:  false"));
}

#[test]
fn threshold_memory_at_full_memory_is_one_third() {
    let out = mdiew(&["threshold", "memory", "--m", "1", "--probs", "0.2,0.5,0.3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!((line_value(&stdout(&out), "numeric:") - 1.0 / 3.0).abs() < 1e-6);
}

#[test]
fn threshold_memory_disagreement_exits_one() {
    let out = mdiew(&[
        "threshold", "memory", "--m", "0.5", "--probs", "0.2,0.5,0.3", "--convention", "all-pairs",
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    assert!(stderr(&out).contains("disagree"));
}

#[test]
fn threshold_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let out = mdiew(&["threshold", "white", "--p1", "1", "--p2", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["noise"]["kind"], "white_noise");
    assert_eq!(v["agree"], true);
}

#[test]
fn fake_detect_example1_finds_negative_value() {
    let out = mdiew(&["fake-detect", "--example", "1", "--polar", "20", "--azimuth", "40"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(line_value(&stdout(&out), "value") < -0.1);
}

#[test]
fn fake_detect_example1_without_noise_is_zero() {
    let out = mdiew(&["fake-detect", "--example", "1", "--q", "0", "--polar", "10", "--azimuth", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("value 0.000000000000"));
}

#[test]
fn fake_detect_example2_sweep() {
    let out = mdiew(&["fake-detect", "--example", "2", "--step", "0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip_while(|l| *l != "p,value").skip(1).collect();
    assert_eq!(rows.len(), 3);
    let first: f64 = rows[0].split(',').nth(1).unwrap().parse().unwrap();
    let last: f64 = rows[2].split(',').nth(1).unwrap().parse().unwrap();
    assert!(first < 0.0);
    assert_eq!(last, 0.0);
}

#[test]
fn fake_detect_rejects_unknown_example() {
    assert_eq!(mdiew(&["fake-detect", "--example", "3"]).status.code(), Some(2));
}

fn scan_to(path: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["scan", "--out", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    mdiew(&args)
}

#[test]
fn scan_is_deterministic_and_writes_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let extra = ["--kind", "white", "--axis1", "p1:0:1:11", "--axis2", "p2:0:1:11", "--seed", "7"];
    assert_eq!(scan_to(&a, &extra).status.code(), Some(0));
    assert_eq!(scan_to(&b, &extra).status.code(), Some(0));
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert!(!bytes.contains(&b'\r'));
    let text = String::from_utf8(bytes).unwrap();
    assert!(text.starts_with("p1\\p2,"));
    assert_eq!(text.lines().count(), 12);

    let sidecar = dir.path().join("a.provenance.json");
    let prov: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(sidecar).unwrap()).unwrap();
    assert_eq!(prov["seed"], 7);
    assert_eq!(prov["config"]["noise_kind"], "white");
}

#[test]
fn scan_without_out_prints_csv() {
    let out = mdiew(&["scan", "--kind", "amplitude-damping", "--axis1", "eps1:0:1:3", "--axis2", "eps2:0:1:3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("eps1\\eps2,"));
}

#[test]
fn scan_numeric_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("closed.csv");
    let b = dir.path().join("numeric.csv");
    let extra = ["--kind", "pauli-different", "--axis1", "p1:0.5:1:6", "--axis2", "p2:0.5:1:6"];
    assert_eq!(scan_to(&a, &extra).status.code(), Some(0));
    let mut numeric = extra.to_vec();
    numeric.push("--numeric");
    assert_eq!(scan_to(&b, &numeric).status.code(), Some(0));
    let parse = |p: &Path| -> Vec<Option<f64>> {
        std::fs::read_to_string(p)
            .unwrap()
            .lines()
            .skip(1)
            .flat_map(|l| l.split(',').skip(1).map(|c| c.parse().ok()).collect::<Vec<_>>())
            .collect()
    };
    for (x, y) in parse(&a).into_iter().zip(parse(&b)) {
        match (x, y) {
            (Some(x), Some(y)) => assert!((x - y).abs() < 1e-6),
            (None, None) => {}
            other => panic!("cells differ: {other:?}"),
        }
    }
}

#[test]
fn scan_rejects_bad_axis_name() {
    let out = mdiew(&["scan", "--kind", "white", "--axis1", "q:0:1:5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("axis1.name"), "{}", stderr(&out));
}

#[test]
fn scan_rejects_malformed_axis() {
    let out = mdiew(&["scan", "--kind", "white", "--axis2", "p2:0:1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("axis2"));
}

#[test]
fn scan_requires_admixture_states() {
    let out = mdiew(&["scan", "--kind", "admixture", "--axis1", "p1:0:1:3", "--axis2", "p2:0:1:3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("fixed.x0"), "{}", stderr(&out));
}

#[test]
fn scan_reports_unwritable_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("grid.csv");
    let out = scan_to(&path, &["--kind", "white", "--axis1", "p1:0:1:3", "--axis2", "p2:0:1:3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains(path.to_str().unwrap()), "{}", stderr(&out));
}

#[test]
fn scan_config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scan.json");
    std::fs::write(
        &config,
        r#"{"noise_kind": "pauli_same",
            "axis1": {"name": "p1", "min": 0, "max": 1, "steps": 5},
            "axis2": {"name": "p2", "min": 0, "max": 1, "steps": 5},
            "fixed_params": {"i": 2}, "seed": 3}"#,
    )
    .unwrap();
    let csv = dir.path().join("grid.csv");
    let out = mdiew(&[
        "scan",
        "--config",
        config.to_str().unwrap(),
        "--axis2",
        "p2:0:1:9",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap().split(',').count(), 10);
    assert_eq!(text.lines().count(), 6);
    let prov: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("grid.provenance.json")).unwrap()).unwrap();
    assert_eq!(prov["seed"], 3);
    assert_eq!(prov["config"]["fixed"]["i"], 2.0);
}

#[test]
fn scan_config_rejects_unknown_field() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scan.json");
    std::fs::write(&config, r#"{"noise_kind": "white", "axis1": {"name": "p1", "min": 0, "max": 1, "steps": 3},
        "axis2": {"name": "p2", "min": 0, "max": 1, "steps": 3}, "colour": 1}"#)
        .unwrap();
    let out = mdiew(&["scan", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn schema_lists_noise_kinds() {
    let out = mdiew(&["schema"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for kind in ["white_noise", "pauli_flip", "amplitude_damping", "entangling_example2", "axis1"] {
        assert!(text.contains(kind), "{kind}");
    }
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(mdiew(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mdiew(&[]).status.code(), Some(2));
}
