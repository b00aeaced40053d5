use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use iso_cycles::cli::SystemConfig;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iso-cycles"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn solve_json() {
    let cfg = fixtures().join("s1-s3.json");
    let out = run(&["solve", "--config", cfg.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["name"], "s1-s3");
    assert_eq!(v["continuum"], false);
    let pairs = v["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 3);
    for p in pairs {
        assert!(p["residual_plus"].as_f64().unwrap() < 1e-10);
        assert!(p["residual_minus"].as_f64().unwrap() < 1e-10);
    }
}

#[test]
fn verify_text_and_exit() {
    let cfg = fixtures().join("s3-s3.json");
    let out = run(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(!out.stdout.is_empty());
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    assert_eq!(run(&["solve", "--config", missing.to_str().unwrap()]).status.code(), Some(2));

    let garbage = write(dir.path(), "bad.json", "{ \"name\": 3 }");
    assert_eq!(run(&["derive", "--config", &garbage]).status.code(), Some(2));

    // omega = 0 is not a center.
    let singular = write(
        dir.path(),
        "singular.json",
        r#"{"name":"x","plus":{"family":"Lc","params":{"A":"0","B":"0","C":"0","D":"1","omega":"0"}},
            "minus":{"family":"Lc","params":{"A":"0","B":"0","C":"0","D":"1","omega":"1"}}}"#,
    );
    assert_eq!(run(&["close", "--config", &singular]).status.code(), Some(2));

    let cfg = fixtures().join("s1-s3.json");
    let out = run(&["solve", "--config", cfg.to_str().unwrap(), "--box", "1,-1,0,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn continuum_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let same = r#"{"family":"Lc","params":{"A":"1/2","B":"0","C":"1","D":"1","omega":"2"}}"#;
    let cfg = write(dir.path(), "same.json", &format!(r#"{{"name":"same","plus":{same},"minus":{same}}}"#));
    let out = run(&["solve", "--config", &cfg, "--json"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["continuum"], true);
}

#[test]
fn plot_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixtures().join("s1-s3.json");
    let out = run(&["plot", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = std::fs::read_to_string(dir.path().join("s1-s3.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("id=\"sigma\"") && svg.contains("cycle-0"));
    let csv = std::fs::read_to_string(dir.path().join("s1-s3.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,x,y,half,cycle_index"));
    let rows: Vec<_> = lines.collect();
    assert!(rows.len() > 10);
    assert!(rows.iter().any(|r| r.ends_with(",minus,0")));
}

#[test]
fn configs_round_trip() {
    for entry in std::fs::read_dir(fixtures()).unwrap() {
        let path = entry.unwrap().path();
        let cfg = SystemConfig::load(&path).unwrap();
        let again = SystemConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, again, "{}", path.display());
        assert_eq!(cfg.system().unwrap(), again.system().unwrap());
    }
}
