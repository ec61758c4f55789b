use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ssb-lab"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .env_remove("SSB_LAB_SEED")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("config.json");
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

const SMALL_FLEA: &str = r#"{
  "experiment": "doublewell_flea",
  "parameters": {
    "hbars": [0.5, 0.2, 0.1, 0.08],
    "grid": {"x_min": -2.0, "x_max": 2.0, "nodes": 401},
    "phase_nodes": 61
  },
  "output_dir": "out"
}"#;

fn csv_rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(String::from)
        .collect()
}

#[test]
fn run_writes_the_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_FLEA);
    let out = run(&["run", &cfg, "--jobs", "2"], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let o = dir.path().join("out");
    let rows = csv_rows(&o.join("localization.csv"));
    assert_eq!(rows.len(), 5);
    assert!(rows[0].starts_with("hbar,flea,b,c,d,x_min,x_max,nodes,"));
    let body = fs::read_to_string(o.join("localization.csv")).unwrap();
    assert!(!body.contains('\r'));
    let hbars: Vec<f64> = rows[1..]
        .iter()
        .map(|r| r.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(hbars, vec![0.5, 0.2, 0.1, 0.08]);
    for r in &rows[1..] {
        assert_eq!(r.split(',').count(), rows[0].split(',').count());
    }
    assert!(o.join("summary.json").exists());
    assert!(o.join("ground_states.svg").exists());
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(o.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "ok");
    assert_eq!(manifest["seed"], 0x5EED);
    assert_eq!(manifest["jobs"], 2);
    assert_eq!(manifest["tasks"].as_array().unwrap().len(), 4);
    assert_eq!(manifest["config"]["experiment"], "doublewell_flea");
    assert!(manifest["started_at"].is_string());
}

#[test]
fn reruns_are_byte_identical_and_out_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_FLEA);
    for (out, jobs) in [("a", "1"), ("b", "3")] {
        let o = run(
            &["run", &cfg, "--out", out, "--jobs", jobs, "--no-svg"],
            dir.path(),
        );
        assert_eq!(o.status.code(), Some(0));
    }
    for f in ["localization.csv", "summary.json"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs");
    }
    let svgs = fs::read_dir(dir.path().join("a"))
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .path()
                .extension()
                .is_some_and(|x| x == "svg")
        })
        .count();
    assert_eq!(svgs, 0);
    assert!(!dir.path().join("out").exists());
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"experiment": "cw_scan", "parameters": {"sizes": [4, 8]}, "output_dir": "out"}"#,
    );
    let o = bin()
        .args(["run", &cfg, "--no-svg"])
        .current_dir(dir.path())
        .env("SSB_LAB_SEED", "0x1234")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["seed"], 0x1234);
    let bad = bin()
        .args(["run", &cfg])
        .current_dir(dir.path())
        .env("SSB_LAB_SEED", "seed")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"experiment": ""}"#, "experiment"),
        (
            r#"{"experiment": "doublewell_flea", "parameters": {"hbars": [0.0]}}"#,
            "hbars",
        ),
        (
            r#"{"experiment": "doublewell_flea", "parameters": {"flea": {"c": 0}}}"#,
            "flea condition (i)",
        ),
        (
            r#"{"experiment": "doublewell_flea", "parameters": {"flea": {"b": 1.1}}}"#,
            "condition (i)",
        ),
        (r#"{"experiment": "doublewell_flea", "oops": 1}"#, "oops"),
        ("{\"experiment\": ", "parse error"),
    ];
    for (body, needle) in cases {
        let cfg = write_config(dir.path(), body);
        for sub in ["validate", "run"] {
            let o = run(&[sub, &cfg], dir.path());
            let err = String::from_utf8_lossy(&o.stderr);
            assert_eq!(o.status.code(), Some(2), "{sub} {body}: {err}");
            assert!(err.contains(needle), "{sub} {body}: {err}");
        }
    }
    assert!(!dir.path().join("ssb-out").exists());
    let o = run(&["run", "--preset", "nope"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["validate", "missing.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn validate_accepts_the_shipped_configs() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(&root).unwrap() {
        let p = entry.unwrap().path();
        let o = run(&["validate", p.to_str().unwrap()], &root);
        assert_eq!(o.status.code(), Some(0), "{}", p.display());
        n += 1;
    }
    assert!(n >= 8);
}

#[test]
fn presets_run_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["presets"], dir.path());
    let listing = String::from_utf8_lossy(&o.stdout);
    for name in ["fig1", "fig5", "ising", "harmonic"] {
        assert!(listing.contains(name));
    }
    let o = run(&["run", "--preset", "harmonic", "--out", "h"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("h/harmonic.csv"));
    assert_eq!(rows.len(), 2);
    assert!(dir.path().join("h/husimi.svg").exists());
}

#[test]
fn unwritable_output_directory_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("blocker"), "").unwrap();
    let o = run(
        &["run", "--preset", "cw", "--out", "blocker/sub"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
}
