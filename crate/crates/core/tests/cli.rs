use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const ZERO_FIELD: &str = r#"
[lattice]
dim = 3

[gamma]
coords = [1, 0, 0]

[basis]
radius = 2.0
"#;

fn magspec(dir: &Path, config_text: &str, args: &[&str]) -> (Output, PathBuf) {
    let config = dir.join("run.toml");
    std::fs::write(&config, config_text).unwrap();
    let out = dir.join("out");
    let output = Command::new(env!("CARGO_BIN_EXE_magspec"))
        .args(args)
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    (output, out)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn zero_field_satisfies_conditions() {
    let dir = TempDir::new().unwrap();
    let (output, out) = magspec(dir.path(), ZERO_FIELD, &["check-conditions"]);
    assert_eq!(
        output.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let report = read_json(&out.join("conditions.json"));
    assert_eq!(report["best"]["theta"].as_f64(), Some(0.0));
}

#[test]
fn large_amplitude_fails_conditions() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"
[lattice]
dim = 3

[potential.a]
modes = [{ n = [0, 1, 0], cos = [4.0, 0.0, 0.0] }]

[gamma]
coords = [1, 0, 0]
"#;
    let (output, out) = magspec(dir.path(), cfg, &["check-conditions"]);
    assert_eq!(output.status.code(), Some(2));
    let theta = read_json(&out.join("conditions.json"))["best"]["theta"]
        .as_f64()
        .unwrap();
    assert!((theta - 4.0 / std::f64::consts::PI).abs() < 1e-8);
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let (output, _) = magspec(dir.path(), "[lattice\ndim = 3", &["bands"]);
    assert_eq!(output.status.code(), Some(1));
    let (output, _) = magspec(dir.path(), "[lattice]\ndim = 3\n[basis]\ncutoff = -1.0\n", &["bands"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn dirac_square_of_zero_field_is_exact() {
    let dir = TempDir::new().unwrap();
    let (output, out) = magspec(dir.path(), ZERO_FIELD, &["verify", "--probe", "dirac_square"]);
    assert_eq!(
        output.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let report = read_json(&out.join("verify_dirac_square.json"));
    assert_eq!(report["pass"], Value::Bool(true));
    for r in report["reports"].as_array().unwrap() {
        assert!(r["residual"].as_f64().unwrap() < 1e-12);
    }
}

#[test]
fn projections_reject_face_centre() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("{ZERO_FIELD}\n[probes]\nk = [{}, 0.0, 0.0]\n", std::f64::consts::PI);
    let (output, _) = magspec(dir.path(), &cfg, &["verify", "--probe", "projections"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn thomas_rejects_k_off_face() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("{ZERO_FIELD}\n[thomas]\nk = [1.0, 0.0, 0.0]\n");
    let (output, _) = magspec(dir.path(), &cfg, &["thomas"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn bands_csv_layout() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("{ZERO_FIELD}\n[bands]\npath = [[0.0, 0.0, 0.0], [0.5, 0.0, 0.0]]\npoints_per_segment = 4\n");
    let (output, out) = magspec(dir.path(), &cfg, &["bands"]);
    assert_eq!(
        output.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let csv = std::fs::read_to_string(out.join("bands.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k_index,j,lambda"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&first[..2], ["0", "1"]);
    assert_eq!(first[2].parse::<f64>().unwrap(), 0.0);
    assert!(out.join("flat_bands.json").exists());
}

#[test]
fn unknown_probe_is_rejected() {
    let dir = TempDir::new().unwrap();
    let (output, _) = magspec(dir.path(), ZERO_FIELD, &["verify", "--probe", "nonsense"]);
    assert_ne!(output.status.code(), Some(0));
}
