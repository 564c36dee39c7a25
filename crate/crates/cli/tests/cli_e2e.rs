use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use serde_json::{json, Value};

const VACUUM: &str = r#"{
    "schema_version": 1,
    "reference_length": 1e-7,
    "geometry": {"kind": "vacuum"},
    "ka": [1.0],
    "checks": ["reciprocity", "transversality", "vacuum_closed_form", "mode_completeness"]
}"#;

const LOSSY_STRICT: &str = r#"{
    "schema_version": 1,
    "reference_length": 1e-7,
    "geometry": {"kind": "sphere"},
    "material": {"kind": "matched", "eps": [2.0, 1.0], "mu": [1.0, 0.0]},
    "ka": [1.0],
    "checks": ["reciprocity", "transversality"],
    "tolerances": {"reciprocity": 1e-30, "transversality": 1e-30}
}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mlnf-verify"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg(config).arg("--out").arg(out).args(extra).output().unwrap()
}

#[test]
fn list_checks_is_stable() {
    let out = bin().arg("list-checks").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(names.len(), 11);
    let mut sorted = names.clone();
    sorted.sort_unstable();
    assert_eq!(names, sorted);
    assert!(names.contains(&"fundamental_relation"));
    assert!(names.contains(&"jones_lemma"));
}

#[test]
fn version_prints_tool_and_version() {
    let out = bin().arg("version").output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), format!("mlnf-verify {}", env!("CARGO_PKG_VERSION")));
}

#[test]
fn config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write(tmp.path(), "bad.json", &VACUUM.replace("\"reciprocity\"", "\"foo\""));
    let out = run(&bad, &tmp.path().join("o"), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("foo"));
    assert!(!tmp.path().join("o").exists());

    let out = run(&tmp.path().join("missing.json"), &tmp.path().join("o"), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));

    let out = bin().arg("run").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn vacuum_suite_passes_quickly() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "vacuum.json", VACUUM);
    let start = Instant::now();
    let out = run(&cfg, &tmp.path().join("o"), &[]);
    assert!(start.elapsed() < Duration::from_secs(5));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let manifest: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("o/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["passed"], true);
    assert_eq!(manifest["reports"].as_array().unwrap().len(), 4);
}

#[test]
fn unreachable_tolerance_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "strict.json", LOSSY_STRICT);
    let out = run(&cfg, &tmp.path().join("o"), &["--jobs", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let manifest: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("o/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["passed"], false);
}

#[test]
fn reproducible_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "vacuum.json", VACUUM);
    run(&cfg, &tmp.path().join("a"), &["--reproducible", "--jobs", "1"]);
    run(&cfg, &tmp.path().join("b"), &["--reproducible", "--jobs", "4"]);
    for name in ["manifest.json", "reciprocity.csv", "transversality.csv", "mode_completeness.csv"] {
        let a = fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = fs::read(tmp.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
    let manifest = fs::read_to_string(tmp.path().join("a/manifest.json")).unwrap();
    assert!(manifest.contains("\"started_at\": \"1970-01-01T00:00:00Z\""));
}

#[test]
fn sweep_csv_format() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "vacuum.json", VACUUM);
    run(&cfg, &tmp.path().join("o"), &[]);
    let text = fs::read_to_string(tmp.path().join("o/mode_completeness.csv")).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("level,residual"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() >= 2);
    for (i, row) in rows.iter().enumerate() {
        let (level, residual) = row.split_once(',').unwrap();
        assert_eq!(level.parse::<usize>().unwrap(), i);
        let (mantissa, _) = residual.split_once('e').expect("scientific notation");
        assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{row}");
        residual.parse::<f64>().unwrap();
    }
}

#[test]
fn threads_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "vacuum.json", VACUUM);
    let out = bin()
        .env("MLNF_VERIFY_THREADS", "2")
        .arg("run")
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("o"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

fn summary(manifest: &Value) -> Value {
    let reports: Vec<Value> = manifest["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            let keys: Vec<&String> = r["parameters"].as_object().unwrap().keys().collect();
            json!({"name": r["name"], "converged": r["converged"], "parameters": keys})
        })
        .collect();
    json!({
        "tool": manifest["tool"],
        "config_hash": manifest["config_hash"],
        "passed": manifest["passed"],
        "reports": reports,
    })
}

#[test]
fn vacuum_manifest_matches_golden_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "vacuum.json", VACUUM);
    run(&cfg, &tmp.path().join("o"), &["--reproducible"]);
    let manifest: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("o/manifest.json")).unwrap()).unwrap();
    let actual = summary(&manifest);
    let golden_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/vacuum_summary.json");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(golden_path.parent().unwrap()).unwrap();
        fs::write(&golden_path, serde_json::to_string_pretty(&actual).unwrap() + "\n").unwrap();
    }
    let golden: Value = serde_json::from_str(&fs::read_to_string(&golden_path).unwrap()).unwrap();
    assert_eq!(actual, golden);
}
