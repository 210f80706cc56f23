use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn isoflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isoflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_of(o: &Output) -> serde_json::Value {
    assert!(!o.status.success());
    let text = String::from_utf8(o.stderr.clone()).unwrap();
    serde_json::from_str(text.trim()).unwrap_or_else(|_| panic!("stderr is not JSON: {text}"))
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("cfg.json");
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn missing_epsilon_reports_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"experiment":"deflate-universality","algorithm":"QR","ensembles":["GOE","BE"],"N":10,"trials":5}"#,
    );
    let e = error_of(&isoflow(&["deflate-universality", "--config", &cfg]));
    assert_eq!(e["error"]["kind"], "config");
    assert_eq!(e["error"]["field"], "epsilon");
}

#[test]
fn unknown_preset_and_mismatched_subcommand_fail() {
    let e = error_of(&isoflow(&["xy", "--preset", "nope"]));
    assert_eq!(e["error"]["field"], "preset");
    let e = error_of(&isoflow(&["xy", "--preset", "sine-gap"]));
    assert_eq!(e["error"]["field"], "experiment");
}

#[test]
fn deflation_run_writes_outputs_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"experiment":"deflate-universality","algorithm":"QR","ensembles":["GOE","BE"],
            "N":12,"epsilon":1e-6,"trials":30,"master_seed":5,"bins":8}"#,
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let ra = isoflow(&[
        "deflate-universality",
        "--config",
        &cfg,
        "--workers",
        "1",
        "--out",
        a.to_str().unwrap(),
    ]);
    assert!(ra.status.success(), "{}", String::from_utf8_lossy(&ra.stderr));
    let rb = isoflow(&[
        "deflate-universality",
        "--config",
        &cfg,
        "--workers",
        "4",
        "--out",
        b.to_str().unwrap(),
    ]);
    assert!(rb.status.success());
    let records = fs::read(a.join("records.csv")).unwrap();
    assert_eq!(records, fs::read(b.join("records.csv")).unwrap());
    assert_eq!(
        fs::read(a.join("histogram.csv")).unwrap(),
        fs::read(b.join("histogram.csv")).unwrap()
    );
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(a.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["experiment"], "deflate-universality");
    assert_eq!(summary["config"]["N"], 12);
    let halted: u64 = summary["results"]["ensembles"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["halted"].as_u64().unwrap())
        .sum();
    let excluded: u64 = summary["results"]["ensembles"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["non_halting"].as_u64().unwrap())
        .sum();
    assert_eq!(halted + excluded, 60);
    let lines = String::from_utf8(records).unwrap().lines().count() as u64;
    assert_eq!(lines, 1 + halted);
}

#[test]
fn seed_flag_changes_records() {
    let one = isoflow(&["lis-mc", "--trials", "20", "--seed", "1"]);
    let two = isoflow(&["lis-mc", "--trials", "20", "--seed", "2"]);
    assert!(one.status.success());
    assert_ne!(stdout(&one), stdout(&two));
    assert_eq!(
        stdout(&one),
        stdout(&isoflow(&["lis-mc", "--trials", "20", "--seed", "1"]))
    );
    assert!(stdout(&one).starts_with("trial,lis,scaled\n"));
}

#[test]
fn sine_gap_preset_prints_table() {
    let o = isoflow(&["sine-gap"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "s,P,product_residual,resolution_change");
    assert_eq!(rows.len(), 4);
}

#[test]
fn trace_subcommands() {
    let o = isoflow(&["toda-trace", "-n", "4", "--t-max", "1", "--dt", "0.25", "--seed", "3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1 + 5);

    let o = isoflow(&["qr-trace", "-n", "5", "--steps", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().last().unwrap().starts_with("3,"));

    let o = isoflow(&["strobe-check", "--trials", "2", "--k-max", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1 + 4);

    let dir = tempfile::tempdir().unwrap();
    let o = isoflow(&[
        "sample-ensemble",
        "--ensemble",
        "be",
        "-n",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("sample.csv")).unwrap();
    assert!(text.starts_with("3\n"));

    let m = dir.path().join("m.csv");
    fs::write(&m, text).unwrap();
    let o = isoflow(&[
        "toda-trace",
        "--matrix",
        m.to_str().unwrap(),
        "--t-max",
        "0.5",
        "--dt",
        "0.5",
    ]);
    assert!(o.status.success());

    let e = error_of(&isoflow(&["toda-trace", "--preset", "xy"]));
    assert_eq!(e["error"]["field"], "config");
}
