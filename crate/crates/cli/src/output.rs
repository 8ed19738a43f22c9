//! `results.csv`, `transcript.log` and the plain-text report.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::config::ExperimentConfig;
use crate::experiments::{CliError, Report, Row};

pub const CSV_HEADER: &str = "experiment,series,d,alpha,b,hlen,slen,k_sym,n_sym,budget,point,half_width,trials,seed";

pub fn csv_line(cfg: &ExperimentConfig, row: &Row) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{:.6},{:.6},{},{}",
        row.experiment.as_str(),
        row.series,
        cfg.d,
        cfg.alpha,
        cfg.b,
        cfg.hlen,
        cfg.slen,
        cfg.k_sym,
        cfg.n_sym,
        row.budget,
        row.point,
        row.half_width,
        row.trials,
        row.seed
    )
}

pub fn render_csv(cfg: &ExperimentConfig, report: &Report) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for row in &report.rows {
        s.push_str(&csv_line(cfg, row));
        s.push('\n');
    }
    s
}

/// Writes every output file once the experiment has finished.
pub fn write_report(dir: &Path, cfg: &ExperimentConfig, report: &Report) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("results.csv"), render_csv(cfg, report))?;
    let mut transcript = report.transcript.join("\n");
    transcript.push('\n');
    fs::write(dir.join("transcript.log"), transcript)?;
    for (rel, contents) in &report.files {
        let path = dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, contents)?;
    }
    Ok(())
}

/// An aligned text table of a `results.csv`.
pub fn summarize(csv: &str) -> Result<String, CliError> {
    let mut lines = csv.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(CliError::Invariant("results.csv has an unexpected header".into()));
    }
    let cols = ["experiment", "series", "budget", "point", "±", "trials", "seed"];
    let pick = [0usize, 1, 9, 10, 11, 12, 13];
    let mut table: Vec<Vec<String>> = vec![cols.iter().map(|c| c.to_string()).collect()];
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 14 {
            return Err(CliError::Invariant(format!("results.csv row {} has {} fields", i + 1, fields.len())));
        }
        table.push(pick.iter().map(|&j| fields[j].to_string()).collect());
    }
    let widths: Vec<usize> = (0..cols.len())
        .map(|j| table.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &table {
        let cells: Vec<String> = row.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
        writeln!(out, "{}", cells.join("  ").trim_end()).unwrap();
    }
    Ok(out)
}
