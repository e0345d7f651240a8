//! Scenario results: tables destined for CSV and a machine-readable summary.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;

/// Every float in a table is written with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: &str, header: Vec<String>) -> Self {
        Self {
            file: file.to_string(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// In-run invariant; any failure makes the exit code nonzero.
    Consistency,
    /// Comparison against an exact prediction.
    Prediction,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value <= tolerance`.
    pub fn at_most(name: &str, kind: CheckKind, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            kind,
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }

    /// Passes when `value >= tolerance`.
    pub fn at_least(name: &str, kind: CheckKind, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            kind,
            value,
            tolerance,
            pass: value >= tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Endpoint {
    pub name: String,
    pub initial: f64,
    pub value: f64,
    pub predicted: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WordSummary {
    pub time_order: String,
    /// The same word as an operator product, rightmost factor first.
    pub operator_order: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub config: RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<WordSummary>,
    pub endpoints: Vec<Endpoint>,
    pub checks: Vec<Check>,
    pub details: Value,
    /// All consistency checks passed.
    pub consistent: bool,
    /// All prediction checks passed.
    pub predictions_pass: bool,
}

impl Summary {
    pub fn new(config: &RunConfig) -> Self {
        Self {
            scenario: config.scenario.name().to_string(),
            config: config.clone(),
            word: None,
            endpoints: Vec::new(),
            checks: Vec::new(),
            details: Value::Null,
            consistent: true,
            predictions_pass: true,
        }
    }

    pub fn finish(mut self) -> Self {
        let all = |kind: CheckKind| {
            self.checks
                .iter()
                .filter(|c| c.kind == kind)
                .all(|c| c.pass)
        };
        self.consistent = all(CheckKind::Consistency);
        self.predictions_pass = all(CheckKind::Prediction);
        self
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn endpoint(&self, name: &str) -> Option<&Endpoint> {
        self.endpoints.iter().find(|e| e.name == name)
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub summary: Summary,
    pub tables: Vec<Table>,
}

impl Outcome {
    pub fn table(&self, file: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.file == file)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for t in &self.tables {
            let path = dir.join(&t.file);
            let mut w = csv::Writer::from_path(&path)
                .with_context(|| format!("creating {}", path.display()))?;
            w.write_record(&t.header)?;
            for row in &t.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        let path = dir.join("summary.json");
        let mut text = serde_json::to_string_pretty(&self.summary)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}
