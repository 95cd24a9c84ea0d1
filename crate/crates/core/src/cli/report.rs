//! Report files written by the `estimate` pipeline.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::csvio::{write_curve_csv, write_table, write_text};
use super::plot;
use crate::error::{Error, Result};
use crate::penalty::EstimationReport;

pub const REPORT_FILE: &str = "report.txt";
pub const SCAN_FILE: &str = "scan.csv";
pub const MULTIPLICATIVE_FILE: &str = "multiplicative.csv";
pub const ADDITIVE_DIR: &str = "additive";
pub const SCAN_HEADER: [&str; 4] = ["assumed_K", "lambda", "estimated_k", "is_candidate"];

fn join(set: &BTreeSet<usize>) -> String {
    set.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

/// `key = value` lines; sets are comma separated, a missing estimate is `none`.
pub fn render_report(report: &EstimationReport) -> String {
    let curve = &report.multiplicative;
    let mut out = String::new();
    let mut line = |key: &str, value: String| {
        let _ = writeln!(out, "{key} = {value}");
    };
    line("n_points", report.n_points.to_string());
    line("dim", report.dim.to_string());
    line(
        "k_range",
        format!("{}..{}", curve.ks.first().unwrap_or(&0), curve.ks.last().unwrap_or(&0)),
    );
    line("k_assumed_max", (report.scan.entries.len() + 1).to_string());
    line("additive_family", report.scan.family.to_string());
    line("multiplicative_family", curve.family.to_string());
    line("additive_candidates", join(&report.scan.candidates));
    line("multiplicative_global_min", report.multiplicative_global_min.to_string());
    line(
        "multiplicative_global_min_at_boundary",
        report.multiplicative_global_min_at_boundary.to_string(),
    );
    line("multiplicative_local_minima", join(&report.multiplicative_local_minima));
    line("agreed", join(&report.agreed));
    line(
        "final_estimate",
        report.final_estimate.map_or_else(|| "none".to_string(), |k| k.to_string()),
    );
    out
}

/// Parse [`render_report`] output back into ordered key/value pairs.
pub fn parse_report(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Input {
        path: dir.to_path_buf(),
        message: e.to_string(),
    })
}

fn additive_path(dir: &Path, assumed_k: usize, ext: &str) -> PathBuf {
    dir.join(ADDITIVE_DIR).join(format!("K{assumed_k:03}.{ext}"))
}

/// Write the report, the scan table and every curve under `dir`.
///
/// Returns the files written, in a fixed order.
pub fn emit_report(report: &EstimationReport, dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(&dir.join(ADDITIVE_DIR))?;
    let mut written = Vec::new();

    let path = dir.join(REPORT_FILE);
    write_text(&path, &render_report(report))?;
    written.push(path);

    let path = dir.join(SCAN_FILE);
    let rows = report.scan.entries.iter().map(|e| {
        vec![
            e.assumed_k.to_string(),
            e.lambda.to_string(),
            e.estimated_k.to_string(),
            e.is_candidate().to_string(),
        ]
    });
    write_table(&path, &SCAN_HEADER, rows)?;
    written.push(path);

    let m = &report.multiplicative;
    let path = dir.join(MULTIPLICATIVE_FILE);
    write_curve_csv(&path, &m.ks, &m.raw_errors, &m.penalized)?;
    written.push(path);

    for entry in &report.scan.entries {
        if let Some(c) = report.additive_curve_for(entry.assumed_k) {
            let path = additive_path(dir, entry.assumed_k, "csv");
            write_curve_csv(&path, &c.ks, &c.raw_errors, &c.penalized)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// SVG plots: the multiplicative curve, the assumed-vs-estimated staircase
/// and one additive curve per assumed K.
pub fn emit_plots(report: &EstimationReport, dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(&dir.join(ADDITIVE_DIR))?;
    let mut written = Vec::new();
    let m = &report.multiplicative;
    let path = dir.join("multiplicative.svg");
    let title = format!("multiplicative penalty, f = {}", m.family);
    write_text(&path, &plot::curve_svg(&title, &m.ks, &m.penalized))?;
    written.push(path);

    let path = dir.join("staircase.svg");
    let pairs: Vec<(usize, usize)> = report
        .scan
        .entries
        .iter()
        .map(|e| (e.assumed_k, e.estimated_k))
        .collect();
    write_text(&path, &plot::staircase_svg(&pairs))?;
    written.push(path);

    for entry in &report.scan.entries {
        if let Some(c) = report.additive_curve_for(entry.assumed_k) {
            let path = additive_path(dir, entry.assumed_k, "svg");
            let title = format!("additive penalty, assumed K = {}, lambda = {:.4e}", entry.assumed_k, entry.lambda);
            write_text(&path, &plot::curve_svg(&title, &c.ks, &c.penalized))?;
            written.push(path);
        }
    }
    Ok(written)
}
