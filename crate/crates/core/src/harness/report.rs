use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{Agreement, ExperimentRow};
use crate::error::Result;

pub const CSV_HEADER: [&str; 14] = [
    "experiment",
    "n",
    "p",
    "lambda1",
    "lambda2",
    "beta",
    "alpha",
    "witness",
    "refinement",
    "value",
    "slope",
    "analytic_verdict",
    "citation",
    "agreement",
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub agree: usize,
    pub disagree: usize,
    pub unstable: usize,
    pub trivial: usize,
}

pub fn write_csv<W: Write>(rows: &[ExperimentRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.experiment.label().to_string(),
            r.n.to_string(),
            r.p.to_string(),
            r.lambda1.to_string(),
            r.lambda2.to_string(),
            r.beta.to_string(),
            r.alpha.to_string(),
            r.witness.clone(),
            r.refinement.to_string(),
            r.value.to_string(),
            r.slope.to_string(),
            r.analytic_verdict.clone(),
            r.citation.clone(),
            r.agreement.label().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Counts per citation tag. Rejected rows are left out.
pub fn summarize(rows: &[ExperimentRow]) -> BTreeMap<String, Counts> {
    let mut m: BTreeMap<String, Counts> = BTreeMap::new();
    for r in rows {
        let c = m.entry(r.citation.clone()).or_default();
        match r.agreement {
            Agreement::Agree => c.agree += 1,
            Agreement::Disagree => c.disagree += 1,
            Agreement::Unstable => c.unstable += 1,
            Agreement::Trivial => c.trivial += 1,
            Agreement::Rejected => {}
        }
    }
    m
}

/// Writes `<path>.csv` and `<path>.json` (a `.csv` suffix on `path` is
/// replaced) and returns both paths.
pub fn run_report(rows: &[ExperimentRow], path: &Path) -> Result<(PathBuf, PathBuf)> {
    let stem = if path.extension().is_some_and(|e| e == "csv" || e == "json") {
        path.with_extension("")
    } else {
        path.to_path_buf()
    };
    let csv_path = PathBuf::from(format!("{}.csv", stem.display()));
    let json_path = PathBuf::from(format!("{}.json", stem.display()));
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_csv(rows, std::fs::File::create(&csv_path)?)?;
    let mut json = serde_json::to_string_pretty(&summarize(rows))?;
    json.push('\n');
    std::fs::write(&json_path, json)?;
    Ok((csv_path, json_path))
}
