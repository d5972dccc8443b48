//! Central-difference check of `Ü = M Û (+ b̂)` on the exact solution.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{column, metadata_from, DataConfig, ProblemData, ProblemKind, StudyError, StudyKind, StudyTable};
use crate::fields::{norm_sq, vec_norm};
use crate::solvers::{OperatorSelector, Problem, TimeSolution};

fn default_steps() -> Vec<f64> {
    vec![1e-2, 5e-3, 2.5e-3]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemporalConfig {
    pub problem: ProblemKind,
    pub operator: OperatorSelector<f64>,
    pub cutoff: usize,
    #[serde(default)]
    pub data: DataConfig,
    pub t: f64,
    #[serde(default = "default_steps")]
    pub steps: Vec<f64>,
}

impl TemporalConfig {
    pub fn solution(&self) -> Result<TimeSolution<f64>, StudyError> {
        let n = self.operator.n();
        Ok(match self.data.generate(self.problem, n, self.cutoff) {
            ProblemData::Homogeneous { f, g } => TimeSolution::homogeneous(self.operator, f, g)?,
            ProblemData::Forced { b } => TimeSolution::forced(self.operator, b)?,
            ProblemData::Equilibrium { .. } => {
                return Err(StudyError::InvalidConfig("temporal check needs an evolution problem".into()))
            }
        })
    }
}

/// Residual of the central second difference with step `h` at time `t`:
/// `max_k ‖δ²_h Û_k − (M_k Û_k + b̂_k)‖ / max_k ‖M_k Û_k + b̂_k‖`.
///
/// Zero data gives a zero residual.
pub fn difference_residual(sol: &TimeSolution<f64>, t: f64, h: f64) -> f64 {
    let u = sol.evaluate_any(t);
    let up = sol.evaluate_any(t + h);
    let um = sol.evaluate_any(t - h);
    let forcing = match &sol.problem {
        Problem::Forced { b } => Some(b),
        Problem::Homogeneous { .. } => None,
    };
    let zero = vec![Complex::new(0.0, 0.0); u.n()];
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for (k, v) in u.coeffs() {
        let mut exact = if norm_sq(k) == 0 { zero.clone() } else { sol.eigen().apply_function(k, v, |l| l) };
        if let Some(bk) = forcing.and_then(|b| b.get(k)) {
            for (e, bi) in exact.iter_mut().zip(bk) {
                *e += bi;
            }
        }
        let p = up.get(k).unwrap_or(&zero);
        let q = um.get(k).unwrap_or(&zero);
        let diff: Vec<Complex<f64>> = (0..v.len()).map(|i| (p[i] - v[i] * 2.0 + q[i]) / (h * h) - exact[i]).collect();
        worst = worst.max(vec_norm(&diff));
        scale = scale.max(vec_norm(&exact));
    }
    if worst == 0.0 {
        0.0
    } else {
        worst / scale
    }
}

/// Residuals over the configured steps; consecutive ratios are recorded in
/// the metadata under `ratios`.
pub fn temporal_consistency_check(config: &TemporalConfig) -> Result<StudyTable, StudyError> {
    if config.steps.iter().any(|h| !(*h > 0.0)) {
        return Err(StudyError::InvalidConfig("steps must be positive".into()));
    }
    if !config.t.is_finite() || config.t < 0.0 {
        return Err(StudyError::InvalidConfig(format!("t = {} must be nonnegative", config.t)));
    }
    let sol = config.solution()?;
    let residuals: Vec<f64> = config.steps.iter().map(|h| difference_residual(&sol, config.t, *h)).collect();
    let ratios: Vec<f64> = residuals.windows(2).map(|w| if w[1] == 0.0 { 0.0 } else { w[0] / w[1] }).collect();
    let mut meta = metadata_from(config);
    meta.insert("ratios".to_string(), Value::from(ratios));
    StudyTable::new(StudyKind::TemporalConsistency, column("h", config.steps.clone()), vec![column("residual", residuals)], meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::SpectralField;
    use crate::multipliers::Material;

    fn config(problem: ProblemKind, t: f64) -> TemporalConfig {
        TemporalConfig {
            problem,
            operator: OperatorSelector::Peridynamic(Material::new(1, 1.0, 0.5, 1.0, 1.0).unwrap()),
            cutoff: 8,
            data: DataConfig { s: 0.0, s1: 1.0, s2: 0.0, seed: 2 },
            t,
            steps: default_steps(),
        }
    }

    #[test]
    fn second_order_ratios() {
        let table = temporal_consistency_check(&config(ProblemKind::Homogeneous, 1.0)).unwrap();
        let r = table.metric("residual").unwrap();
        for w in r.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..=4.5).contains(&ratio), "{r:?}");
        }
    }

    #[test]
    fn forced_at_zero() {
        let sol = config(ProblemKind::Forced, 0.0).solution().unwrap();
        assert!(difference_residual(&sol, 0.0, 1e-3) < 1e-6);
    }

    #[test]
    fn zero_data() {
        let op = OperatorSelector::Navier { n: 2, mu: 1.0, lambda_star: 1.0 };
        let zero = SpectralField::zeros(2, 3, true);
        let sol = TimeSolution::homogeneous(op, zero.clone(), zero).unwrap();
        assert_eq!(difference_residual(&sol, 1.0, 1e-2), 0.0);
    }

    #[test]
    fn equilibrium_rejected() {
        assert!(temporal_consistency_check(&config(ProblemKind::Equilibrium, 1.0)).is_err());
    }
}
