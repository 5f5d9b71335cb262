use serde::Serialize;
use serde_json::{Map, Value};
use std::fs;
use std::path::Path;

use super::config::{ExperimentKind, RunConfig};
use crate::error::{Error, Result};

/// Version of the summary JSON layout.
pub const SUMMARY_SCHEMA_VERSION: u32 = 1;

/// Outcome of one configured check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssertionOutcome {
    pub name: String,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub passed: bool,
}

impl AssertionOutcome {
    /// `lower ≤ value ≤ upper`; NaN never passes.
    pub fn check(name: &str, value: f64, lower: Option<f64>, upper: Option<f64>) -> Self {
        let passed = !value.is_nan() && lower.is_none_or(|l| value >= l) && upper.is_none_or(|u| value <= u);
        Self {
            name: name.to_string(),
            value,
            lower,
            upper,
            passed,
        }
    }
}

/// Machine-readable result of a run, written as `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    pub seed: u64,
    pub config: RunConfig,
    /// Kind-specific scalars and tables.
    pub metrics: Map<String, Value>,
    pub assertions: Vec<AssertionOutcome>,
    /// True iff every assertion passed.
    pub passed: bool,
    pub runtime_seconds: f64,
    /// Files of the bundle, relative to the output directory.
    pub files: Vec<String>,
}

/// All artifacts of a run, held in memory until written.
#[derive(Debug, Clone)]
pub struct ArtifactBundle {
    pub summary: Summary,
    /// `(relative path, contents)`.
    pub files: Vec<(String, Vec<u8>)>,
}

impl ArtifactBundle {
    pub fn passed(&self) -> bool {
        self.summary.passed
    }

    pub fn file(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }

    /// Writes every file and `summary.json` below `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, bytes)?;
        }
        let mut json = serde_json::to_vec_pretty(&self.summary)?;
        json.push(b'\n');
        fs::write(dir.join("summary.json"), json)?;
        Ok(())
    }
}

/// Accumulates metrics, assertions and files while a run proceeds.
#[derive(Debug, Default)]
pub(crate) struct Collector {
    pub metrics: Map<String, Value>,
    pub assertions: Vec<AssertionOutcome>,
    pub files: Vec<(String, Vec<u8>)>,
    skip: Vec<String>,
}

impl Collector {
    pub fn new(skip: &[String]) -> Self {
        Self {
            skip: skip.to_vec(),
            ..Default::default()
        }
    }

    pub fn metric(&mut self, name: &str, value: impl Serialize) -> Result<()> {
        self.metrics.insert(name.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn assert(&mut self, name: &str, value: f64, lower: Option<f64>, upper: Option<f64>) {
        if !self.skip.iter().any(|s| s == name) {
            self.assertions.push(AssertionOutcome::check(name, value, lower, upper));
        }
    }

    pub fn file(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }
}

/// Serializes rows with a header taken from the row type's field names.
pub(crate) fn csv_rows<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Serializes numeric rows under an explicit header.
pub(crate) fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        if r.len() != header.len() {
            return Err(Error::Contract(format!("row has {} values for {} columns", r.len(), header.len())));
        }
        w.write_record(r.iter().map(|v| format!("{v:?}")))?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}
