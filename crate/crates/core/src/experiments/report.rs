//! Result tables, `results.csv` and `summary.json`.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CSV_HEADER: [&str; 8] = ["experiment", "params", "metric", "empirical", "analytic", "band", "oracle", "pass"];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write to {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("summary serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Reported for context; not a pass/fail comparison.
    Info,
}

impl Status {
    pub fn check(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
        })
    }
}

/// One comparison. `oracle` names the operation that produced `analytic`;
/// pure formula rows leave `empirical` empty.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub params: String,
    pub metric: String,
    pub empirical: Option<f64>,
    pub analytic: Option<f64>,
    pub band: Option<f64>,
    pub oracle: String,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub experiment: String,
    pub seed: u64,
    pub alpha: f64,
    pub ci_method: String,
    pub rows: Vec<ResultRow>,
    pub wall_time_s: f64,
}

impl ResultTable {
    pub fn new(experiment: impl Into<String>, seed: u64, alpha: f64) -> Self {
        ResultTable {
            experiment: experiment.into(),
            seed,
            alpha,
            ci_method: "clopper-pearson; dkw".into(),
            rows: Vec::new(),
            wall_time_s: 0.0,
        }
    }

    pub fn push(&mut self, row: ResultRow) {
        self.rows.push(row);
    }

    pub fn passes(&self) -> usize {
        self.rows.iter().filter(|r| r.status == Status::Pass).count()
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.status == Status::Fail).count()
    }

    pub fn all_pass(&self) -> bool {
        self.failures() == 0
    }

    pub fn find(&self, metric: &str, params: &str) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.metric == metric && r.params == params)
    }

    pub fn summary(&self) -> Summary {
        Summary {
            experiment: self.experiment.clone(),
            seed: self.seed,
            rows: self.rows.len(),
            passes: self.passes(),
            failures: self.failures(),
            wall_time_s: self.wall_time_s,
            alpha: self.alpha,
            ci_method: self.ci_method.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: String,
    pub seed: u64,
    pub rows: usize,
    pub passes: usize,
    pub failures: usize,
    pub wall_time_s: f64,
    pub alpha: f64,
    pub ci_method: String,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV bytes for the table; deterministic for a fixed row sequence.
pub fn csv_bytes(table: &ResultTable) -> Result<Vec<u8>, ReportError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CSV_HEADER)?;
    for r in &table.rows {
        writer.write_record([
            r.experiment.clone(),
            r.params.clone(),
            r.metric.clone(),
            fmt_opt(r.empirical),
            fmt_opt(r.analytic),
            fmt_opt(r.band),
            r.oracle.clone(),
            r.status.to_string(),
        ])?;
    }
    writer.into_inner().map_err(|e| ReportError::Csv(e.into_error().into()))
}

/// Writes `results.csv` and `summary.json` into `dir`, creating it if needed.
pub fn emit_results(table: &ResultTable, dir: &Path) -> Result<(PathBuf, PathBuf), ReportError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ReportError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let csv_path = dir.join("results.csv");
    fs::write(&csv_path, csv_bytes(table)?).map_err(io(&csv_path))?;
    let json_path = dir.join("summary.json");
    let json = serde_json::to_string_pretty(&table.summary())?;
    fs::write(&json_path, json + "\n").map_err(io(&json_path))?;
    Ok((csv_path, json_path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(status: Status) -> ResultRow {
        ResultRow {
            experiment: "survival".into(),
            params: "p=2;m=1".into(),
            metric: "freq".into(),
            empirical: Some(0.5),
            analytic: Some(0.5),
            band: None,
            oracle: "lemma1_survival".into(),
            status,
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        let table = ResultTable::new("survival", 3, 1e-3);
        let text = String::from_utf8(csv_bytes(&table).unwrap()).unwrap();
        assert_eq!(text, "experiment,params,metric,empirical,analytic,band,oracle,pass\n");
    }

    #[test]
    fn emitted_files_round_trip() {
        let mut table = ResultTable::new("survival", 42, 1e-3);
        table.push(row(Status::Pass));
        table.push(row(Status::Fail));
        table.push(row(Status::Info));
        let dir = tempfile::tempdir().unwrap();
        let (csv_path, json_path) = emit_results(&table, &dir.path().join("nested")).unwrap();
        let mut reader = csv::Reader::from_path(csv_path).unwrap();
        assert_eq!(reader.headers().unwrap(), CSV_HEADER.as_slice());
        let records: Vec<_> = reader.records().collect::<Result<_, _>>().unwrap();
        assert_eq!(records.len(), table.rows.len());
        assert_eq!(&records[2][5], "");
        let summary: Summary = serde_json::from_str(&fs::read_to_string(json_path).unwrap()).unwrap();
        assert_eq!(summary.seed, 42);
        assert_eq!((summary.passes, summary.failures, summary.rows), (1, 1, 3));
        assert!(!table.all_pass());
    }

    #[test]
    fn unwritable_directory_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("plain");
        fs::write(&file, "x").unwrap();
        let table = ResultTable::new("survival", 0, 1e-3);
        assert!(matches!(emit_results(&table, &file.join("sub")), Err(ReportError::Io { .. })));
    }
}
