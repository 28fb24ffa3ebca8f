use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use subwave::cli::*;

const CIRCLE: &str = r#"{"dimension": 2, "material": {"lambda": 1, "mu": 1, "rho": 1},
    "shape": {"kind": "circle", "radius": 0.25}}"#;

fn bin(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_subwave")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn exit_codes_for_schema_and_physics_errors() {
    let dir = tempfile::tempdir().unwrap();
    let typo = write(dir.path(), "typo.json", &CIRCLE.replace("\"lambda\"", "\"lamda\""));
    let (code, _, err) = bin(&["qmatrix", "--config", &typo, "--alpha", "1,2"]);
    assert_eq!(code, 2);
    assert!(err.contains("lamda"), "{err}");
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"dimension": 3, "material": {"lambda": -1, "mu": 1, "rho": 1}, "shape": {"kind": "sphere", "radius": 0.25}}"#,
    );
    let (code, _, err) = bin(&["qmatrix", "--config", &bad, "--alpha", "1,2,3"]);
    assert_eq!(code, 3);
    assert!(err.contains("convexity"), "{err}");
    let ok = write(dir.path(), "ok.json", CIRCLE);
    let (code, out, _) = bin(&["qmatrix", "--config", &ok, "--alpha", "3.141592653589793,3.141592653589793"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("# subwave") && out.contains("\"resolution\":128") && out.contains("beta = 1.2493"), "{out}");
    let (code, _, _) = bin(&["qmatrix", "--config", &ok, "--alpha", "1,2,3"]);
    assert_eq!(code, 2);
    let single = write(dir.path(), "single.json", &CIRCLE.replace("\"shape\"", "\"oracle\": {\"deltas\": [1e-3]}, \"shape\""));
    let (code, _, err) = bin(&["oracle", "--config", &single]);
    assert_eq!(code, 2);
    assert!(err.contains("at least 3 delta values spanning a decade"), "{err}");
}

#[test]
fn band_files_follow_the_format_contract() {
    let loaded = parse_config(CIRCLE).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let res = run_bands(&loaded, dir.path()).unwrap();
    let csv = std::fs::read_to_string(&res.csv_path).unwrap();
    let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "alpha_1,alpha_2,branch,beta,omega_leading,flag");
    assert_eq!(body.iter().filter(|l| l.ends_with(",computed")).count(), 64);
    assert_eq!(body.iter().filter(|l| l.ends_with(",analytic")).count(), 4);
    assert!(!csv.contains('\r'));
    let header: Vec<&str> = csv.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(header.iter().any(|l| l.starts_with("# config_sha256 = ")));
    assert!(header.iter().any(|l| l.contains("\"per_segment\":11") && l.contains("\"epsilon\":0.0001")));
    let first = body[1].split(',').nth(4).unwrap();
    assert_eq!(first.split('e').next().unwrap().replace(['-', '.'], "").len(), 17, "{first}");
    let report = std::fs::read_to_string(&res.report_path).unwrap();
    for key in ["omega_star = ", "eta = ", "lower_edge = ", "gap = ", "validity_note = "] {
        assert!(report.contains(key), "{key}");
    }
}

#[test]
fn failing_sweep_exits_with_four() {
    let text = CIRCLE.replace(
        "\"shape\"",
        r#""lattice": {"verify": true, "fourier_truncation": 1, "spatial_truncation": 1, "split_parameter": 0.01}, "path": {"per_segment": 2}, "shape""#,
    );
    let loaded = parse_config(&text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let e = run_bands(&loaded, dir.path()).unwrap_err();
    assert_eq!(e.code, EXIT_SWEEP, "{}", e.message);
}

#[test]
fn ball_check_passes_and_its_negative_control_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"dimension": 3, "material": {"lambda": 1, "mu": 1, "rho": 1},
        "shape": {"kind": "sphere", "radius": 1.0}, "resolution": 288}"#;
    let loaded = parse_config(cfg).unwrap();
    let report = run_ball_check(&loaded).unwrap();
    assert!(report.pass(), "{}", report.render(&loaded));
    assert_eq!(report.lines.len(), 5);
    let strict = write(dir.path(), "strict.json", &cfg.replace("\"resolution\": 288", "\"resolution\": 288, \"ball\": {\"single_layer_tol\": 1e-17, \"q_tol\": 1e-17, \"omega_tol\": 1e-17}"));
    let (code, out, _) = bin(&["ball-check", "--config", &strict]);
    assert_eq!(code, 5, "{out}");
    assert!(out.lines().any(|l| l.starts_with("FAIL ")));
}

#[test]
fn ball_check_closed_form_line_for_a_stiffer_medium() {
    let cfg = r#"{"dimension": 3, "material": {"lambda": 3, "mu": 2, "rho": 1},
        "shape": {"kind": "sphere", "radius": 0.25}, "resolution": 128}"#;
    let loaded = parse_config(cfg).unwrap();
    let report = run_ball_check(&loaded).unwrap();
    let q = report.lines.iter().find(|l| l.name == "q_matrix").unwrap();
    assert!((q.expected - 21.0 * PI / 8.0).abs() < 1e-12, "{}", q.expected);
    assert!(report.pass(), "{}", report.render(&loaded));
}

#[test]
fn effective_config_round_trips() {
    let loaded = parse_config(CIRCLE).unwrap();
    let echo = serde_json::to_string(&loaded.config).unwrap();
    let again = parse_config(&echo).unwrap();
    assert_eq!(again.config, loaded.config);
}
