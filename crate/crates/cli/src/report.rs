//! Report rows and the JSON/CSV writers.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::config::{Config, ExperimentKind};
use crate::experiments::columns;

#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub id: String,
    pub kind: ExperimentKind,
    /// The experiment as run, with defaults filled in.
    pub inputs: serde_json::Value,
    pub values: BTreeMap<String, f64>,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub wall_clock_s: f64,
}

impl ReportRow {
    /// Builds a row whose numeric fields are all finite and whose pass flag
    /// is `residual <= tolerance` with no error.
    pub fn new(
        id: String,
        kind: ExperimentKind,
        inputs: serde_json::Value,
        outcome: Result<(Vec<f64>, f64), String>,
        tolerance: f64,
        wall_clock_s: f64,
    ) -> Self {
        let (vals, residual, mut error) = match outcome {
            Ok((v, r)) => (v, r, None),
            Err(e) => (vec![], f64::MAX, Some(e)),
        };
        let mut values = BTreeMap::new();
        for (name, v) in columns(kind).iter().zip(vals) {
            if !v.is_finite() && error.is_none() {
                error = Some(format!("{name} is not finite"));
            }
            values.insert(name.to_string(), if v.is_finite() { v } else { f64::MAX });
        }
        let residual = if residual.is_finite() {
            residual
        } else {
            error.get_or_insert_with(|| "residual is not finite".into());
            f64::MAX
        };
        let pass = error.is_none() && residual <= tolerance;
        Self { id, kind, inputs, values, residual, tolerance, pass, error, wall_clock_s }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub config_echo: Config,
    pub rows: Vec<ReportRow>,
    pub summary: Summary,
}

impl Report {
    pub fn new(config_echo: Config, rows: Vec<ReportRow>) -> Self {
        let passed = rows.iter().filter(|r| r.pass).count();
        let failed = rows.len() - passed;
        Self { config_echo, rows, summary: Summary { passed, failed } }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn failing(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Writes `report.json` and, if asked, one `<kind>.csv` per kind present.
    pub fn write(&self, dir: &Path, csv: bool) -> std::io::Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let json = dir.join("report.json");
        std::fs::write(&json, self.to_json() + "\n")?;
        let mut written = vec![json];
        if csv {
            for kind in ExperimentKind::ALL {
                let rows: Vec<&ReportRow> = self.rows.iter().filter(|r| r.kind == kind).collect();
                if rows.is_empty() {
                    continue;
                }
                let path = dir.join(format!("{}.csv", kind.name()));
                let mut w = csv::Writer::from_path(&path)?;
                let mut header = vec!["id", "pass", "residual", "tolerance", "wall_clock_s"];
                header.extend(columns(kind));
                w.write_record(&header)?;
                for r in rows {
                    let mut rec = vec![r.id.clone(), r.pass.to_string(), r.residual.to_string(), r.tolerance.to_string()];
                    rec.push(r.wall_clock_s.to_string());
                    rec.extend(columns(kind).iter().map(|c| r.values.get(*c).map(|v| v.to_string()).unwrap_or_default()));
                    w.write_record(&rec)?;
                }
                w.flush()?;
                written.push(path);
            }
        }
        Ok(written)
    }
}
