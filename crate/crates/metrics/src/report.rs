//! Named scalar results with run metadata, serialized as JSON and appended
//! to a run-level CSV with schema `metric,value,dataset,model,seed`.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{MetricError, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MetricReport {
    pub dataset: String,
    pub model: String,
    pub seed: u64,
    /// Insertion-ordered (metric, value) pairs.
    pub values: Vec<(String, f64)>,
}

impl MetricReport {
    pub fn new(dataset: impl Into<String>, model: impl Into<String>, seed: u64) -> Self {
        Self {
            dataset: dataset.into(),
            model: model.into(),
            seed,
            values: Vec::new(),
        }
    }

    /// Record a value; non-finite values are refused rather than stored.
    pub fn push(&mut self, metric: impl Into<String>, value: f64) -> Result<()> {
        let name = metric.into();
        if !value.is_finite() {
            return Err(MetricError::NonFinite(name));
        }
        self.values.push((name, value));
        Ok(())
    }

    pub fn get(&self, metric: &str) -> Option<f64> {
        self.values
            .iter()
            .find(|(n, _)| n == metric)
            .map(|(_, v)| *v)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Append rows to `path`, writing the header if the file is new.
    pub fn append_csv(&self, path: &Path) -> Result<()> {
        let new_file = !path.exists();
        let mut f = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)?;
        if new_file {
            writeln!(f, "metric,value,dataset,model,seed")?;
        }
        for (name, value) in &self.values {
            writeln!(
                f,
                "{},{},{},{},{}",
                name, value, self.dataset, self.model, self.seed
            )?;
        }
        Ok(())
    }
}
