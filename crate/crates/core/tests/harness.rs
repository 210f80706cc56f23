use std::fs;

use isoflow::harness::{run, ExperimentConfig};
use isoflow::Error;

fn small_deflation() -> ExperimentConfig {
    ExperimentConfig::from_json(
        r#"{"experiment":"deflate-universality","algorithm":"Toda","ensembles":["GOE","BE"],
            "N":10,"epsilon":1e-6,"trials":24,"master_seed":17,"bins":6}"#,
    )
    .unwrap()
}

fn records_with_workers(mut cfg: ExperimentConfig, workers: usize) -> String {
    cfg.worker_count = Some(workers);
    run(&cfg).unwrap().records_csv()
}

#[test]
fn records_are_schedule_independent() {
    let a = records_with_workers(small_deflation(), 1);
    assert_eq!(a, records_with_workers(small_deflation(), 8));
    assert_eq!(a, records_with_workers(small_deflation(), 3));

    let mut gap = ExperimentConfig::preset("gap-law").unwrap();
    gap.trials = Some(40);
    gap.n = Some(20);
    assert_eq!(records_with_workers(gap.clone(), 1), records_with_workers(gap, 8));

    let mut lis = ExperimentConfig::preset("lis-mc").unwrap();
    lis.trials = Some(200);
    assert_eq!(records_with_workers(lis.clone(), 1), records_with_workers(lis, 8));
}

#[test]
fn same_config_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_deflation();
    let one = dir.path().join("one");
    let two = dir.path().join("two");
    run(&cfg).unwrap().write_outputs(&one).unwrap();
    run(&cfg).unwrap().write_outputs(&two).unwrap();
    for f in ["records.csv", "histogram.csv"] {
        assert_eq!(fs::read(one.join(f)).unwrap(), fs::read(two.join(f)).unwrap(), "{f}");
    }
    let s: serde_json::Value = serde_json::from_slice(&fs::read(one.join("summary.json")).unwrap()).unwrap();
    assert_eq!(s["config"]["algorithm"], "Toda");
    assert!(s["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert!(s["tool_version"].is_string());
}

#[test]
fn failed_write_leaves_no_summary() {
    let dir = tempfile::tempdir().unwrap();
    // a directory where records.csv should go makes the rename fail
    fs::create_dir_all(dir.path().join("records.csv/blocker")).unwrap();
    let result = run(&small_deflation()).unwrap();
    assert!(matches!(result.write_outputs(dir.path()), Err(Error::Io(_))));
    assert!(!dir.path().join("summary.json").exists());
}

#[test]
fn csv_uses_seventeen_significant_digits() {
    let mut cfg = ExperimentConfig::preset("sine-gap").unwrap();
    cfg.s_values = Some(vec![0.5]);
    let csv = run(&cfg).unwrap().records_csv();
    let row = csv.lines().nth(1).unwrap();
    let p = row.split(',').nth(1).unwrap();
    let mantissa = p.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{p}");
}

#[test]
fn presets_match_figure_captions() {
    let qr = ExperimentConfig::preset("fig3a-qr").unwrap();
    assert_eq!((qr.n, qr.epsilon, qr.trials), (Some(100), Some(1e-10), Some(2000)));
    let toda = ExperimentConfig::preset("fig3b-toda").unwrap();
    assert_eq!((toda.n, toda.epsilon), (Some(100), Some(1e-8)));
}

#[test]
fn xy_run_reports_non_real_determinant() {
    let mut cfg = ExperimentConfig::preset("xy").unwrap();
    cfg.t_values = Some(vec![0.0, 5.0, 10.0]);
    let r = run(&cfg).unwrap();
    let s = r.summary();
    assert_eq!(s["results"]["non_real_points"], 2);
    let first = r.records_csv().lines().nth(1).unwrap().to_string();
    let x0: f64 = first.split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(x0, 1.0);
}
