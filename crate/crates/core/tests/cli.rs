use std::fs;
use std::path::Path;
use std::process::Command;

use proptest::prelude::*;

use penalized_kmeans::cli::{
    emit_report, parse_csv, parse_report, read_curve_csv, render_report, run_estimate, write_csv,
    Input, RunConfig, MULTIPLICATIVE_FILE, REPORT_FILE, SCAN_FILE,
};
use penalized_kmeans::clustering::Dataset;
use penalized_kmeans::synth::SynthSpec;
use penalized_kmeans::Error;

fn ten_disks(seed: u64) -> SynthSpec {
    SynthSpec {
        clusters: 10,
        dim: 2,
        points_per_cluster: 100,
        min_separation: 3.0,
        seed,
        ..SynthSpec::default()
    }
}

fn report_value(text: &str, key: &str) -> String {
    parse_report(text)
        .into_iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v)
        .unwrap_or_else(|| panic!("missing {key}"))
}

fn penkm(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_penkm")).args(args).output().unwrap()
}

#[test]
fn csv_examples() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    };
    let d = parse_csv(&write("a.csv", "0,0\n1,0\n")).unwrap();
    assert_eq!((d.len(), d.dim()), (2, 2));
    let d = parse_csv(&write("b.csv", "x,y\n0,0\n")).unwrap();
    assert_eq!((d.len(), d.dim()), (1, 2));
    match parse_csv(&write("c.csv", "0,0\n1\n")) {
        Err(Error::Csv { row, .. }) => assert_eq!(row, 2),
        other => panic!("{other:?}"),
    }
    let msg = parse_csv(&write("d.csv", "0,0\n1,z\n")).unwrap_err().to_string();
    assert!(msg.contains("row 2") && msg.contains("column 2"), "{msg}");
    assert!(parse_csv(&write("e.csv", "")).is_err());
    assert!(parse_csv(&dir.path().join("missing.csv")).is_err());
}

proptest! {
    #[test]
    fn point_csv_round_trip(v in prop::collection::vec(-1e6f64..1e6, 1..60), header: bool) {
        let dim = 1 + v.len() % 3;
        let n = v.len() / dim;
        prop_assume!(n >= 1);
        let data = Dataset::new(dim, v[..n * dim].to_vec()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        write_csv(&path, &data, header).unwrap();
        prop_assert_eq!(parse_csv(&path).unwrap(), data);
    }
}

#[test]
fn pipeline_reports_and_curves() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(Input::Synth(ten_disks(0)), 10);
    cfg.output_dir = Some(dir.path().to_path_buf());
    let out = run_estimate(&cfg).unwrap();
    assert_eq!(out.report.multiplicative_global_min, 10);
    assert_eq!(out.report.final_estimate, Some(10));

    let text = fs::read_to_string(dir.path().join(REPORT_FILE)).unwrap();
    assert_eq!(report_value(&text, "final_estimate"), "10");
    assert_eq!(report_value(&text, "k_range"), "1..30");

    let scan = fs::read_to_string(dir.path().join(SCAN_FILE)).unwrap();
    assert_eq!(scan.lines().count() - 1, 10 - 1);
    assert!(scan.starts_with("assumed_K,lambda,estimated_k,is_candidate\n"));

    let curve = read_curve_csv(&dir.path().join(MULTIPLICATIVE_FILE)).unwrap();
    let m = &out.report.multiplicative;
    assert_eq!(curve.ks, m.ks);
    for (a, b) in curve.raw_errors.iter().zip(&m.raw_errors) {
        assert!((a - b).abs() <= 1e-12 * b.abs());
    }
    for (a, b) in curve.penalized.iter().zip(&m.penalized) {
        assert!((a - b).abs() <= 1e-12 * b.abs());
    }
    let additive = read_curve_csv(&dir.path().join("additive").join("K010.csv")).unwrap();
    let expected = out.report.additive_curve_for(10).unwrap();
    assert_eq!(additive.penalized, expected.penalized);
}

#[test]
fn report_final_estimate_field() {
    let cfg = RunConfig::new(Input::Synth(ten_disks(0)), 10);
    let mut report = run_estimate(&cfg).unwrap().report;
    report.agreed = [16].into_iter().collect();
    report.final_estimate = Some(16);
    assert_eq!(report_value(&render_report(&report), "final_estimate"), "16");
    report.agreed.clear();
    report.final_estimate = None;
    let text = render_report(&report);
    assert_eq!(report_value(&text, "final_estimate"), "none");
    assert_eq!(report_value(&text, "agreed"), "");
}

#[test]
fn high_dimension_pipeline() {
    let spec = SynthSpec {
        clusters: 20,
        dim: 8,
        points_per_cluster: 150,
        min_separation: 3.0,
        seed: 2,
        ..SynthSpec::default()
    };
    let report = run_estimate(&RunConfig::new(Input::Synth(spec), 20)).unwrap().report;
    assert_eq!(report.multiplicative_global_min, 20);
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            files.extend(tree(&path));
        } else {
            files.push((path.strip_prefix(dir).unwrap().display().to_string(), fs::read(&path).unwrap()));
        }
    }
    files.sort();
    files
}

#[test]
fn outputs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let mut cfg = RunConfig::new(Input::Synth(ten_disks(5)), 8);
        cfg.output_dir = Some(dir.path().to_path_buf());
        cfg.emit_plots = true;
        cfg.filter = Some(Default::default());
        run_estimate(&cfg).unwrap();
    }
    let (ta, tb) = (tree(a.path()), tree(b.path()));
    assert!(ta.len() > 10);
    assert_eq!(ta, tb);
}

#[test]
fn emit_report_writes_expected_files() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_estimate(&RunConfig::new(Input::Synth(ten_disks(1)), 4)).unwrap().report;
    let files = emit_report(&report, dir.path()).unwrap();
    assert_eq!(files.len(), 3 + 3);
    assert!(files.iter().all(|f| f.exists()));
}

#[test]
fn binary_subcommands_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).display().to_string();
    let pts = p("pts.csv");

    let out = penkm(&["gen", "--clusters", "4", "--points", "40", "--seed", "3", "--out", &pts, "--truth", &p("t.csv")]);
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(p("t.csv")).unwrap().lines().count(), 1 + 160);

    let out = penkm(&["filter", "--input", &pts, "--out", &p("kept.csv"), "--removed", &p("rm.csv")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = penkm(&["cluster", "--input", &pts, "-k", "4", "--labels", &p("l.csv")]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("sizes = 40,40,40,40"));

    let out = penkm(&["scan", "--input", &pts, "--k-max", "6"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 1 + 5);

    let out = penkm(&["estimate", "--input", &pts, "--k-max", "6", "--out-dir", &p("run"), "--plots"]);
    assert!(out.status.success());
    assert!(dir.path().join("run").join("staircase.svg").exists());

    let out = penkm(&["geometry", "--d-max", "3"]);
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.lines().nth(1).unwrap().starts_with("1,0.3333333333333333,"));

    let out = penkm(&["verify", "--samples", "5000", "--dims", "2"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 1 + 3);

    // a single blob still completes, estimate or not
    let blob = p("blob.csv");
    assert!(penkm(&["gen", "--clusters", "1", "--dim", "3", "--points", "200", "--out", &blob]).status.success());
    assert!(penkm(&["estimate", "--input", &blob, "--k-max", "5"]).status.success());

    fs::write(p("bad.csv"), "0,0\n1\n").unwrap();
    let out = penkm(&["estimate", "--input", &p("bad.csv")]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 2"));
    assert!(!penkm(&["estimate", "--input", &p("absent.csv")]).status.success());
    assert!(!penkm(&["estimate", "--family", "cubic"]).status.success());
}
