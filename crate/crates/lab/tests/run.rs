use std::fs;

use serde_json::{json, Value};

use ssb_lab::config::{validate_config, Experiment, ExperimentKind};
use ssb_lab::experiments::{execute, run_tasks, Ctx, Report, TaskStatus};
use ssb_lab::output::{Cell, Table};
use ssb_lab::run::{exit_status, run_with, RunOptions, EXIT_SOLVER};
use ssb_lab::{parse_seed, run, ExperimentConfig};

fn config(raw: &str) -> ExperimentConfig {
    validate_config(raw).unwrap()
}

#[test]
fn partial_failures_still_write_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(r#"{"experiment": "cw_scan"}"#);
    let opts = RunOptions {
        out: Some(dir.path().to_path_buf()),
        jobs: Some(2),
        no_svg: false,
        seed: 7,
    };
    let result = run_with(&cfg, &opts, |_, _| {
        let tasks = run_tasks(
            vec![("good".to_string(), 1.0), ("bad".to_string(), -1.0)],
            |h: f64| {
                if h > 0.0 {
                    Ok(h)
                } else {
                    Err(ssb_core::Error::NoConvergence {
                        iterations: 3,
                        residuals: vec![1.0],
                    })
                }
            },
        );
        let mut t = Table::new("partial", &["hbar"]);
        for v in tasks.iter().filter_map(|t| t.ok()) {
            t.push(vec![Cell::from(*v)]);
        }
        Report {
            tables: vec![t],
            summary: json!({"partial": true}),
            plots: vec![],
            tasks: tasks.iter().map(TaskStatus::from).collect(),
        }
    });
    assert_eq!(exit_status(&result), EXIT_SOLVER);
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["status"], "partial_failure");
    assert_eq!(manifest["tasks"][0]["status"], "ok");
    assert_eq!(manifest["tasks"][1]["status"], "failed");
    assert!(manifest["tasks"][1]["error"]
        .as_str()
        .unwrap()
        .contains("did not converge"));
    assert_eq!(manifest["seed"], 7);
    let csv = fs::read_to_string(dir.path().join("partial.csv")).unwrap();
    assert_eq!(csv, "hbar\n1.0000000000000000e0\n");
}

#[test]
fn results_keep_parameter_order_for_any_pool_size() {
    let cfg = config(
        r#"{"experiment": "ising_limits", "parameters": {"sizes": [6, 4, 5], "epsilons": [1e-2, 1e-1]}}"#,
    );
    let reference = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| execute(&cfg, &Ctx::default()));
    for jobs in [2, 5] {
        let r = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .unwrap()
            .install(|| execute(&cfg, &Ctx::default()));
        assert_eq!(r.tables[0].to_csv(), reference.tables[0].to_csv());
    }
    let labels: Vec<&str> = reference.tasks.iter().map(|t| t.label.as_str()).collect();
    assert_eq!(labels[0], "N=4 eps=0.01");
    assert_eq!(labels.last().unwrap(), &"N=6 eps=-0.1");
}

#[test]
fn every_experiment_reports_full_parameter_tuples() {
    let cfg = config(
        r#"{"experiment": "gap_scaling", "parameters": {"hbars": [0.3, 0.25, 0.2], "grid": {"nodes": 401}}}"#,
    );
    let r = execute(&cfg, &Ctx::default());
    let t = r.table("gap").unwrap();
    for col in ["hbar", "x_min", "x_max", "nodes"] {
        assert!(t.column(col).is_some(), "{col}");
    }
    assert_eq!(t.rows.len(), 3);
    assert!(!r.failed());
}

#[test]
fn seeds_parse_in_decimal_and_hex() {
    assert_eq!(parse_seed("24301"), Some(24301));
    assert_eq!(parse_seed("0x5EED"), Some(0x5EED));
    assert_eq!(parse_seed(" 0X10 "), Some(16));
    assert_eq!(parse_seed("0xZZ"), None);
    assert_eq!(parse_seed("-1"), None);
}

#[test]
fn run_writes_summary_and_echoes_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(Experiment::defaults(ExperimentKind::CwScan));
    cfg.output_dir = dir.path().join("cw");
    let outcome = run(
        &cfg,
        &RunOptions {
            seed: 1,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(exit_status(&Ok(outcome.clone())), 0);
    assert_eq!(outcome.manifest.config, cfg.to_json());
    assert!(outcome.manifest.outputs.contains(&"cw.csv".to_string()));
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("cw/summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["experiment"], "cw_scan");
}

#[test]
fn spin_flea_selects_the_predicted_magnetization() {
    let p = ssb_lab::config::CwParams::default();
    let out = ssb_lab::experiments::cw::run(&p, &Ctx::default());
    assert_eq!(out.predicted_side, -1);
    let z: Vec<(usize, f64)> = out
        .rows(ssb_lab::experiments::cw::Variant::Flea)
        .map(|r| (r.n, r.ground.point.z))
        .collect();
    let (n_small, z_small) = z[0];
    let (n_large, z_large) = *z.last().unwrap();
    assert_eq!((n_small, n_large), (10, 200));
    assert!(z_large < 0.0 && z_small <= 0.0, "{z:?}");
    assert!(z_small.abs() < z_large.abs() / 5.0, "{z:?}");
    for (a, b) in out
        .rows(ssb_lab::experiments::cw::Variant::Flea)
        .zip(out.rows(ssb_lab::experiments::cw::Variant::FleaFlipped))
    {
        assert!((a.ground.point.z + b.ground.point.z).abs() < 1e-8);
    }
}
