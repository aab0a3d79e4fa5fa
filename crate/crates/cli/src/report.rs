use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use semicz::bourgain::ReportRow;

use crate::CliError;

/// 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

const FIXED: [&str; 9] = ["experiment", "operator", "d", "L", "m", "instance", "seed", "parameter", "value"];

/// Column names: the fixed columns, then every quantity and every check (lhs, rhs, holds)
/// in order of first appearance.
pub fn columns(rows: &[ReportRow]) -> Vec<String> {
    let mut quantities: Vec<String> = Vec::new();
    let mut checks: Vec<String> = Vec::new();
    for r in rows {
        for q in &r.quantities {
            if !quantities.contains(&q.name) {
                quantities.push(q.name.clone());
            }
        }
        for c in &r.checks {
            if !checks.contains(&c.name) {
                checks.push(c.name.clone());
            }
        }
    }
    let mut out: Vec<String> = FIXED.iter().map(|s| s.to_string()).collect();
    out.extend(quantities);
    for c in checks {
        out.push(format!("check_{c}_lhs"));
        out.push(format!("check_{c}_rhs"));
        out.push(format!("check_{c}_holds"));
    }
    out
}

fn record(row: &ReportRow, columns: &[String]) -> Vec<String> {
    let mut out = vec![
        row.experiment.clone(),
        row.operator.clone(),
        row.d.to_string(),
        row.level.to_string(),
        row.m.to_string(),
        row.instance.to_string(),
        row.seed.to_string(),
        row.parameter.clone(),
        fmt_float(row.value),
    ];
    for col in &columns[FIXED.len()..] {
        let cell = if let Some(rest) = col.strip_prefix("check_") {
            let (name, field) = rest.rsplit_once('_').expect("check column");
            row.checks.iter().find(|c| c.name == name).map(|c| match field {
                "lhs" => fmt_float(c.lhs),
                "rhs" => fmt_float(c.rhs),
                _ => c.holds().to_string(),
            })
        } else {
            row.quantity(col).map(fmt_float)
        };
        out.push(cell.unwrap_or_default());
    }
    out
}

/// CSV with a leading `# generated_at_unix=…` line; everything after it is deterministic.
pub fn write_csv(path: &Path, rows: &[ReportRow], timestamp: u64) -> Result<(), CliError> {
    let mut file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    writeln!(file, "# generated_at_unix={timestamp}").map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    let cols = columns(rows);
    w.write_record(&cols).map_err(|e| CliError::Io(e.to_string()))?;
    for r in rows {
        w.write_record(record(r, &cols)).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

#[derive(Serialize)]
struct JsonReport<'a> {
    generated_at_unix: u64,
    rows: &'a [ReportRow],
}

pub fn write_json_rows(path: &Path, rows: &[ReportRow], timestamp: u64) -> Result<(), CliError> {
    write_json(
        path,
        &JsonReport {
            generated_at_unix: timestamp,
            rows,
        },
    )
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridEntry {
    pub d: usize,
    #[serde(rename = "L")]
    pub level: u32,
    pub m: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Stability {
    pub coarse: f64,
    pub fine: f64,
    pub ratio: f64,
    pub within_factor_2: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub operator: String,
    /// Largest headline constant over all rows of the base level.
    #[serde(rename = "C_emp")]
    pub c_emp: f64,
    pub headline: String,
    pub grids: Vec<GridEntry>,
    pub seeds: Vec<u64>,
    pub rows: usize,
    pub violations: usize,
    pub stability: Option<Stability>,
}

/// `<base>.<ext>` keeping any dots already in the file name.
pub fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let mut name = base.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(suffix);
    base.with_file_name(name)
}
