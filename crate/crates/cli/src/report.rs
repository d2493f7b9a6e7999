//! Report tables: one row per evaluated configuration, percentages at two
//! decimals, emitted as CSV and JSON.

use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use tasnif::evaluate::MetricsReport;

use crate::{CliError, CliResult};

/// Converts a fraction in `[0, 1]` to a percentage rounded half-up to two
/// decimals.
pub fn pct(fraction: f64) -> f64 {
    (fraction * 100.0 * 100.0 + 0.5).floor() / 100.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub config: String,
    pub feature_count: Option<usize>,
    pub accuracy_pct: f64,
    pub precision_pct: f64,
    pub recall_pct: f64,
}

impl ReportRow {
    /// Builds a row from a cross-validation report.
    pub fn from_report(config: impl Into<String>, report: &MetricsReport, features: bool) -> Self {
        ReportRow {
            config: config.into(),
            feature_count: features.then(|| report.mean_feature_count().round() as usize),
            accuracy_pct: pct(report.mean_accuracy),
            precision_pct: pct(report.mean_precision),
            recall_pct: pct(report.mean_recall),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportTable {
    pub title: String,
    pub rows: Vec<ReportRow>,
}

impl ReportTable {
    pub fn new(title: impl Into<String>, rows: Vec<ReportRow>) -> Self {
        ReportTable {
            title: title.into(),
            rows,
        }
    }

    /// CSV with the fixed header
    /// `config,feature_count,accuracy_pct,precision_pct,recall_pct`;
    /// the feature column is left empty for rows that do not report one.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> io::Result<()> {
        writeln!(
            writer,
            "config,feature_count,accuracy_pct,precision_pct,recall_pct"
        )?;
        for row in &self.rows {
            let features = row.feature_count.map(|f| f.to_string()).unwrap_or_default();
            writeln!(
                writer,
                "{},{},{:.2},{:.2},{:.2}",
                csv_quote(&row.config),
                features,
                row.accuracy_pct,
                row.precision_pct,
                row.recall_pct
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("vec write");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn from_json_file(path: &Path) -> CliResult<Self> {
        let contents = std::fs::read_to_string(path).map_err(|e| {
            CliError::Runtime(anyhow::anyhow!("cannot read {}: {e}", path.display()))
        })?;
        serde_json::from_str(&contents)
            .map_err(|e| CliError::Runtime(anyhow::anyhow!("bad table JSON: {e}")))
    }
}

fn csv_quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}
