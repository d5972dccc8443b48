//! Convergence of the peridynamic multipliers and solutions to the Navier
//! ones as `δ → 0` or `β → n+2`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{column, metadata_from, DataConfig, ProblemData, ProblemKind, StudyError, StudyKind, StudyTable};
use crate::fields::{lattice_points, SpectralField};
use crate::multipliers::{multiplier_matrix, navier_reference, Material};
use crate::solvers::{solve_equilibrium, OperatorSelector, TimeSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepTarget {
    Multiplier,
    Equilibrium,
    Homogeneous,
    Forced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// `δ = 2^{−j}` at fixed `β`.
    DeltaToZero,
    /// `β = n + 2 − 2^{−j}` at fixed `δ`.
    BetaToNp2,
}

fn default_t() -> f64 {
    1.0
}

fn default_epsilon() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub target: SweepTarget,
    pub sweep: SweepKind,
    /// The swept parameter of this material is overridden per row.
    pub material: Material<f64>,
    /// Dyadic exponents `j`; defaults to `0..=6` (δ) or `1..=7` (β).
    #[serde(default)]
    pub exponents: Option<Vec<u32>>,
    /// Cutoff `K` of the data, or of the lattice for the multiplier target.
    pub cutoff: usize,
    /// Single frequency for the multiplier target.
    #[serde(default)]
    pub k: Option<Vec<i64>>,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default = "default_t")]
    pub t: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

impl SweepConfig {
    fn exponents(&self) -> Vec<u32> {
        self.exponents.clone().unwrap_or_else(|| match self.sweep {
            SweepKind::DeltaToZero => (0..=6).collect(),
            SweepKind::BetaToNp2 => (1..=7).collect(),
        })
    }

    fn material_at(&self, j: u32) -> Result<(f64, Material<f64>), StudyError> {
        let step = 2f64.powi(-(j as i32));
        let m = &self.material;
        Ok(match self.sweep {
            SweepKind::DeltaToZero => (step, m.with_delta(step)?),
            SweepKind::BetaToNp2 => {
                let beta = m.n() as f64 + 2.0 - step;
                (beta, m.with_beta(beta)?)
            }
        })
    }

    /// Sobolev index of the error norm for a row with kernel exponent `beta`.
    fn norm_index(&self, beta: f64) -> f64 {
        let n = self.material.n() as f64;
        let d = &self.data;
        let eps = self.epsilon;
        match (self.sweep, self.target) {
            (_, SweepTarget::Multiplier) => 0.0,
            (SweepKind::DeltaToZero, SweepTarget::Equilibrium | SweepTarget::Forced) => d.s + (beta - n).max(0.0),
            (SweepKind::DeltaToZero, SweepTarget::Homogeneous) => d.s1.min(d.s2 + ((beta - n) / 2.0).max(0.0)),
            (SweepKind::BetaToNp2, SweepTarget::Equilibrium | SweepTarget::Forced) => d.s + 2.0 - eps,
            (SweepKind::BetaToNp2, SweepTarget::Homogeneous) => d.s1.min(d.s2 + (2.0 - eps) / 2.0),
        }
    }
}

fn solution(op: OperatorSelector<f64>, data: &ProblemData, t: f64) -> Result<SpectralField<f64>, StudyError> {
    Ok(match data {
        ProblemData::Equilibrium { b } => solve_equilibrium(&op, b)?,
        ProblemData::Homogeneous { f, g } => TimeSolution::homogeneous(op, f.clone(), g.clone())?.evaluate(t)?,
        ProblemData::Forced { b } => TimeSolution::forced(op, b.clone())?.evaluate(t)?,
    })
}

/// One row: `(parameter, error, reference norm)`.
type Row = (f64, f64, f64);

fn multiplier_rows(config: &SweepConfig, materials: &[(f64, Material<f64>)]) -> Result<Vec<Row>, StudyError> {
    let m0 = &config.material;
    let freqs: Vec<Vec<i64>> = match &config.k {
        Some(k) => vec![k.clone()],
        None => lattice_points(m0.n(), config.cutoff).into_iter().filter(|k| k.iter().any(|x| *x != 0)).collect(),
    };
    materials
        .par_iter()
        .map(|(param, m)| {
            let mut worst: (f64, f64) = (0.0, 0.0);
            for k in &freqs {
                let nu: Vec<f64> = k.iter().map(|x| *x as f64).collect();
                let navier = navier_reference(m.mu(), m.lambda_star(), &nu);
                let err = multiplier_matrix(m, &nu)?.distance(&navier);
                if err > worst.0 {
                    worst = (err, navier.operator_norm());
                }
            }
            Ok((*param, worst.0, worst.1))
        })
        .collect()
}

fn solution_rows(config: &SweepConfig, materials: &[(f64, Material<f64>)]) -> Result<Vec<Row>, StudyError> {
    let m0 = &config.material;
    let kind = match config.target {
        SweepTarget::Equilibrium => ProblemKind::Equilibrium,
        SweepTarget::Homogeneous => ProblemKind::Homogeneous,
        SweepTarget::Forced => ProblemKind::Forced,
        SweepTarget::Multiplier => unreachable!("handled separately"),
    };
    let data = config.data.generate(kind, m0.n(), config.cutoff);
    let navier = OperatorSelector::Navier { n: m0.n(), mu: m0.mu(), lambda_star: m0.lambda_star() };
    let reference = solution(navier, &data, config.t)?;
    materials
        .par_iter()
        .map(|(param, m)| {
            let q = config.norm_index(m.beta());
            let u = solution(OperatorSelector::Peridynamic(*m), &data, config.t)?;
            Ok((*param, u.sub(&reference)?.sobolev_norm(q), reference.sobolev_norm(q)))
        })
        .collect()
}

/// Error between the peridynamic and Navier multipliers or solutions along
/// a dyadic sweep.
///
/// Columns: the swept parameter (`delta` or `beta`), `error`,
/// `reference_norm` and `relative_error`.
pub fn local_limit_sweep(config: &SweepConfig) -> Result<StudyTable, StudyError> {
    if config.sweep == SweepKind::BetaToNp2 && !(config.epsilon > 0.0 && config.epsilon < 2.0) {
        return Err(StudyError::InvalidConfig(format!("epsilon = {} must lie in (0, 2)", config.epsilon)));
    }
    if config.t < 0.0 || !config.t.is_finite() {
        return Err(StudyError::InvalidConfig(format!("t = {} must be nonnegative", config.t)));
    }
    if let Some(k) = &config.k {
        if k.len() != config.material.n() {
            return Err(StudyError::InvalidConfig(format!("k has {} entries, n = {}", k.len(), config.material.n())));
        }
    }
    let materials: Vec<(f64, Material<f64>)> =
        config.exponents().into_iter().map(|j| config.material_at(j)).collect::<Result<_, _>>()?;
    let rows = match config.target {
        SweepTarget::Multiplier => multiplier_rows(config, &materials)?,
        _ => solution_rows(config, &materials)?,
    };
    let name = match config.sweep {
        SweepKind::DeltaToZero => "delta",
        SweepKind::BetaToNp2 => "beta",
    };
    let mut meta = metadata_from(config);
    let indices: Vec<f64> = materials.iter().map(|(_, m)| config.norm_index(m.beta())).collect();
    meta.insert("norm_index".to_string(), serde_json::to_value(indices).expect("finite"));
    StudyTable::new(
        StudyKind::LocalLimitSweep,
        column(name, rows.iter().map(|r| r.0).collect()),
        vec![
            column("error", rows.iter().map(|r| r.1).collect()),
            column("reference_norm", rows.iter().map(|r| r.2).collect()),
            column("relative_error", rows.iter().map(|r| if r.2 > 0.0 { r.1 / r.2 } else { r.1 }).collect()),
        ],
        meta,
    )
}
