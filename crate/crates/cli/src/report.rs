//! Run reports and their JSON/CSV renderings.

use std::io::Write;

use ewens_core::thresholds::{Thresholds, Verdict};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliResult;
use crate::spec::SpecDocument;

pub const TOOL: &str = "ewens-tauber";

/// JSON value for a float; non-finite values become string markers.
pub fn float(x: f64) -> Value {
    match serde_json::Number::from_f64(x) {
        Some(n) => Value::Number(n),
        None if x.is_nan() => Value::String("nan".into()),
        None if x > 0.0 => Value::String("+inf".into()),
        None => Value::String("-inf".into()),
    }
}

/// One output row; keys keep insertion order so CSV columns are stable.
#[derive(Debug, Clone, Default, Serialize)]
#[serde(transparent)]
pub struct Row(Map<String, Value>);

impl Row {
    pub fn new(n: usize) -> Self {
        Row::default().int("n", n as u64)
    }

    pub fn int(mut self, key: &str, v: u64) -> Self {
        self.0.insert(key.into(), Value::from(v));
        self
    }

    pub fn num(mut self, key: &str, v: f64) -> Self {
        self.0.insert(key.into(), float(v));
        self
    }

    /// Paired `KEY_re`, `KEY_im` columns.
    pub fn complex(self, key: &str, v: Complex64) -> Self {
        self.num(&format!("{key}_re"), v.re).num(&format!("{key}_im"), v.im)
    }

    pub fn text(mut self, key: &str, v: impl Into<String>) -> Self {
        self.0.insert(key.into(), Value::String(v.into()));
        self
    }

    pub fn flag(mut self, key: &str, v: bool) -> Self {
        self.0.insert(key.into(), Value::Bool(v));
        self
    }

    pub fn opt_num(self, key: &str, v: Option<f64>) -> Self {
        match v {
            Some(x) => self.num(key, x),
            None => self.text(key, ""),
        }
    }

    fn columns(&self) -> Vec<&str> {
        self.0.keys().map(String::as_str).collect()
    }

    fn cells(&self) -> Vec<String> {
        self.0
            .values()
            .map(|v| match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdsReport {
    #[serde(flatten)]
    pub values: Thresholds,
    /// Names of thresholds changed from the versioned defaults by flag.
    pub overridden: Vec<&'static str>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<SpecDocument>,
    pub parameters: Map<String, Value>,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<ThresholdsReport>,
    pub rows: Vec<Row>,
    #[serde(skip_serializing_if = "Map::is_empty")]
    pub summary: Map<String, Value>,
    pub verdict: Option<Verdict>,
    /// Excluded from determinism comparisons.
    pub wall_clock_s: f64,
}

impl RunReport {
    pub fn new(command: Vec<String>) -> Self {
        Self {
            tool: TOOL,
            version: env!("CARGO_PKG_VERSION"),
            command,
            spec: None,
            parameters: Map::new(),
            seed: None,
            thresholds: None,
            rows: Vec::new(),
            summary: Map::new(),
            verdict: None,
            wall_clock_s: 0.0,
        }
    }

    pub fn param(&mut self, key: &str, v: impl Into<Value>) {
        self.parameters.insert(key.into(), v.into());
    }

    pub fn write_json(&self, out: &mut impl Write) -> CliResult<()> {
        serde_json::to_writer_pretty(&mut *out, self)?;
        writeln!(out).map_err(csv::Error::from)?;
        Ok(())
    }

    /// Header row plus one record per row; the verdict is not part of the table.
    pub fn write_csv(&self, out: &mut impl Write) -> CliResult<()> {
        let mut writer = csv::Writer::from_writer(out);
        if let Some(first) = self.rows.first() {
            writer.write_record(first.columns())?;
            for row in &self.rows {
                writer.write_record(row.cells())?;
            }
        }
        writer.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_paired_columns() {
        let mut report = RunReport::new(vec!["mean".into()]);
        report.rows.push(Row::new(4).complex("mean", Complex64::new(0.375, 0.0)).num("ratio", f64::INFINITY));
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n,mean_re,mean_im,ratio\n4,0.375,0.0,+inf\n");
    }

    #[test]
    fn large_and_small_floats_use_plain_decimal_point() {
        assert_eq!(float(1234567.5).to_string(), "1234567.5");
        assert_eq!(float(5.6e-17).to_string(), "5.6e-17");
        assert_eq!(float(f64::NAN), Value::String("nan".into()));
    }
}
