use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::trials::TrialRecord;
use crate::error::{invalid, Result};

pub const CSV_HEADER: &str =
    "problem,algorithm,mean_time_s,median_time_s,std_time_s,min_time_s,max_time_s,mean_nodes,success_rate";

/// Aggregate over a set of trials. Time and node statistics cover solved
/// trials only; `std_time_s` is the population standard deviation. Time
/// fields are `None` when nothing was solved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub problem: String,
    pub algorithm: String,
    pub mean_time_s: Option<f64>,
    pub median_time_s: Option<f64>,
    pub std_time_s: Option<f64>,
    pub min_time_s: Option<f64>,
    pub max_time_s: Option<f64>,
    pub mean_nodes: Option<f64>,
    pub success_rate: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(invalid(format!("unknown format {other:?}"))),
        }
    }
}

/// Summarizes `records`. `include_time = false` blanks all time fields,
/// which makes the row independent of machine speed.
pub fn summarize(problem: &str, records: &[TrialRecord], include_time: bool) -> Result<StatsRow> {
    let first = records.first().ok_or_else(|| invalid("no trial records"))?;
    let solved: Vec<&TrialRecord> = records.iter().filter(|r| r.result.solved()).collect();
    let mut times: Vec<f64> = solved.iter().map(|r| r.result.wall_time).collect();
    times.sort_by(f64::total_cmp);
    let n = times.len() as f64;
    let (mean, median, std, min, max) = if times.is_empty() || !include_time {
        (None, None, None, None, None)
    } else {
        let mean = times.iter().sum::<f64>() / n;
        let mid = times.len() / 2;
        let median = if times.len() % 2 == 1 {
            times[mid]
        } else {
            (times[mid - 1] + times[mid]) / 2.0
        };
        let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n;
        (
            Some(mean),
            Some(median),
            Some(var.sqrt()),
            times.first().copied(),
            times.last().copied(),
        )
    };
    let mean_nodes = if solved.is_empty() {
        None
    } else {
        Some(solved.iter().map(|r| r.result.total_nodes() as f64).sum::<f64>() / solved.len() as f64)
    };
    Ok(StatsRow {
        problem: problem.to_string(),
        algorithm: first.variant.key().to_string(),
        mean_time_s: mean,
        median_time_s: median,
        std_time_s: std,
        min_time_s: min,
        max_time_s: max,
        mean_nodes,
        success_rate: solved.len() as f64 / records.len() as f64,
    })
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn to_csv(rows: &[StatsRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            csv_field(&r.problem),
            csv_field(&r.algorithm),
            cell(r.mean_time_s),
            cell(r.median_time_s),
            cell(r.std_time_s),
            cell(r.min_time_s),
            cell(r.max_time_s),
            cell(r.mean_nodes),
            r.success_rate.to_string(),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn to_json(rows: &[StatsRow]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(rows)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<Vec<StatsRow>> {
    Ok(serde_json::from_str(text)?)
}

/// Writes `rows` to `out` in `format`.
pub fn emit_results(rows: &[StatsRow], format: Format, out: &Path) -> Result<()> {
    let text = match format {
        Format::Csv => to_csv(rows),
        Format::Json => to_json(rows)?,
    };
    let mut f = std::fs::File::create(out)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}
