//! Run directory layout: `result.json`, `series/*.csv`, `plots/*.dat`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::config::Format;
use crate::pipeline::{Outcome, Series};
use crate::result::RunResult;
use crate::LabError;

pub fn to_json(result: &RunResult) -> Result<String, LabError> {
    serde_json::to_string_pretty(result).map_err(|e| LabError::Config(e.to_string()))
}

pub fn from_json(text: &str) -> Result<RunResult, LabError> {
    serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))
}

fn csv(series: &Series) -> String {
    let mut out = series.columns.join(",");
    out.push('\n');
    for row in &series.rows {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn dat(series: &Series) -> String {
    let mut out = format!("# {}\n", series.columns.join(" "));
    for row in &series.rows {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{v:e}");
        }
        out.push('\n');
    }
    out
}

pub fn write_outcome(outcome: &Outcome, dir: &Path, formats: &[Format]) -> Result<(), LabError> {
    fs::create_dir_all(dir)?;
    if formats.contains(&Format::Json) {
        fs::write(dir.join("result.json"), to_json(&outcome.result)?)?;
    }
    for t in &outcome.tables {
        fs::write(dir.join(format!("{}.csv", t.name)), csv(t))?;
    }
    if formats.contains(&Format::Csv) && !outcome.series.is_empty() {
        let d = dir.join("series");
        fs::create_dir_all(&d)?;
        for s in &outcome.series {
            fs::write(d.join(format!("{}.csv", s.name)), csv(s))?;
        }
    }
    if formats.contains(&Format::Dat) && !(outcome.series.is_empty() && outcome.tables.is_empty()) {
        let d = dir.join("plots");
        fs::create_dir_all(&d)?;
        for s in outcome.series.iter().chain(&outcome.tables) {
            fs::write(d.join(format!("{}.dat", s.name)), dat(s))?;
        }
    }
    Ok(())
}
