//! Study tables and their CSV/JSON renderings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::StudyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    LocalLimitSweep,
    AsymptoticValidation,
    Regularity,
    TemporalConsistency,
}

impl StudyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::LocalLimitSweep => "local_limit_sweep",
            Self::AsymptoticValidation => "asymptotic_validation",
            Self::Regularity => "regularity",
            Self::TemporalConsistency => "temporal_consistency",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

/// A parameter column, named metric columns and free-form metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "RawTable", into = "RawTable")]
pub struct StudyTable {
    study_kind: StudyKind,
    parameter: Column,
    metrics: Vec<Column>,
    metadata: BTreeMap<String, Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    study_kind: StudyKind,
    parameter: Column,
    metrics: Vec<Column>,
    metadata: BTreeMap<String, Value>,
}

impl TryFrom<RawTable> for StudyTable {
    type Error = StudyError;
    fn try_from(r: RawTable) -> Result<Self, StudyError> {
        StudyTable::new(r.study_kind, r.parameter, r.metrics, r.metadata)
    }
}

impl From<StudyTable> for RawTable {
    fn from(t: StudyTable) -> Self {
        RawTable { study_kind: t.study_kind, parameter: t.parameter, metrics: t.metrics, metadata: t.metadata }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl StudyTable {
    /// Validates equal column lengths (at least 2) and finite entries.
    pub fn new(
        study_kind: StudyKind,
        parameter: Column,
        metrics: Vec<Column>,
        metadata: BTreeMap<String, Value>,
    ) -> Result<Self, StudyError> {
        let rows = parameter.values.len();
        if rows < 2 {
            return Err(StudyError::InvalidTable(format!("{rows} rows; at least 2 are required")));
        }
        for col in std::iter::once(&parameter).chain(&metrics) {
            if col.values.len() != rows {
                return Err(StudyError::InvalidTable(format!(
                    "column {} has {} rows, expected {rows}",
                    col.name,
                    col.values.len()
                )));
            }
            if let Some(row) = col.values.iter().position(|v| !v.is_finite()) {
                return Err(StudyError::NonFinite { column: col.name.clone(), row });
            }
        }
        Ok(Self { study_kind, parameter, metrics, metadata })
    }

    pub fn study_kind(&self) -> StudyKind {
        self.study_kind
    }
    pub fn parameter(&self) -> &Column {
        &self.parameter
    }
    pub fn metrics(&self) -> &[Column] {
        &self.metrics
    }
    pub fn metadata(&self) -> &BTreeMap<String, Value> {
        &self.metadata
    }
    pub fn rows(&self) -> usize {
        self.parameter.values.len()
    }

    pub fn metric(&self, name: &str) -> Option<&[f64]> {
        self.metrics.iter().find(|c| c.name == name).map(|c| c.values.as_slice())
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# study_kind: {}\n", self.study_kind.as_str());
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let header: Vec<&str> = std::iter::once(&self.parameter).chain(&self.metrics).map(|c| c.name.as_str()).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for i in 0..self.rows() {
            let row: Vec<String> = std::iter::once(&self.parameter)
                .chain(&self.metrics)
                .map(|c| format_g17(c.values[i]))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, StudyError> {
        serde_json::from_str(text).map_err(|e| StudyError::InvalidTable(e.to_string()))
    }

    pub fn emit(&self, format: OutputFormat) -> Vec<u8> {
        match format {
            OutputFormat::Csv => self.to_csv().into_bytes(),
            OutputFormat::Json => self.to_json().into_bytes(),
        }
    }
}

/// C `%.17g` rendering of a double.
pub fn format_g17(x: f64) -> String {
    const PRECISION: i32 = 17;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= PRECISION {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (PRECISION - 1 - exp) as usize, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
