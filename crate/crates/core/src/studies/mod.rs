//! Verification studies: local-limit sweeps, asymptotic validation,
//! regularity fits and temporal consistency. Each returns a [`StudyTable`].

mod asymptotic;
mod regularity;
mod sweep;
mod table;
mod temporal;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::fields::{make_decay_field, FieldError, SpectralField};
use crate::multipliers::MultiplierError;
use crate::solvers::SolverError;

pub use asymptotic::{asymptotic_validation, AsymptoticConfig};
pub use regularity::{regularity_study, ChannelFit, RegularityConfig, RegularityOutcome};
pub use sweep::{local_limit_sweep, SweepConfig, SweepKind, SweepTarget};
pub use table::{format_g17, Column, OutputFormat, StudyKind, StudyTable};
pub use temporal::{difference_residual, temporal_consistency_check, TemporalConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StudyError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Multiplier(#[from] MultiplierError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("invalid study configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("non-finite value in column {column}, row {row}")]
    NonFinite { column: String, row: usize },
}

/// Which problem a study solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Equilibrium,
    Homogeneous,
    Forced,
}

/// Sobolev indices and seed of the synthetic data.
///
/// `s` indexes `b` (equilibrium, forced); `s1`, `s2` index `f`, `g`.
/// `b` and `f` use `seed`, `g` uses `seed + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    #[serde(default)]
    pub s: f64,
    #[serde(default)]
    pub s1: f64,
    #[serde(default)]
    pub s2: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self { s: 0.0, s1: 0.0, s2: 0.0, seed: 0 }
    }
}

/// Synthetic fields for a problem.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemData {
    Equilibrium { b: SpectralField<f64> },
    Homogeneous { f: SpectralField<f64>, g: SpectralField<f64> },
    Forced { b: SpectralField<f64> },
}

impl DataConfig {
    pub fn generate(&self, kind: ProblemKind, n: usize, cutoff: usize) -> ProblemData {
        match kind {
            ProblemKind::Equilibrium => ProblemData::Equilibrium { b: make_decay_field(n, cutoff, self.s, self.seed) },
            ProblemKind::Homogeneous => ProblemData::Homogeneous {
                f: make_decay_field(n, cutoff, self.s1, self.seed),
                g: make_decay_field(n, cutoff, self.s2, self.seed.wrapping_add(1)),
            },
            ProblemKind::Forced => ProblemData::Forced { b: make_decay_field(n, cutoff, self.s, self.seed) },
        }
    }
}

fn metadata_from<C: Serialize>(config: &C) -> BTreeMap<String, Value> {
    let mut meta = BTreeMap::new();
    meta.insert("config".to_string(), serde_json::to_value(config).expect("config serializes"));
    meta
}

fn column(name: &str, values: Vec<f64>) -> Column {
    Column { name: name.to_string(), values }
}
