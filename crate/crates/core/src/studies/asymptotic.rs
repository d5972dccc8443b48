//! Large-radius expansions against quadrature reference eigenvalues.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{column, metadata_from, StudyError, StudyKind, StudyTable};
use crate::asymptotics::{lambda1_asymptotic_combined, lambda1_component_asymptotics, lambda2_asymptotic};
use crate::multipliers::{eigenvalues_quadrature, lambda1_parts_quadrature, Material, ORACLE_MAX_ARGUMENT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptoticConfig {
    pub material: Material<f64>,
    pub radii: Vec<f64>,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Per radius: reference `λ2`, `λ1`, `λ_{1,1}`, `λ_{1,2}` by quadrature,
/// their expansions and errors. Both readings of the combined `λ1`
/// expansion are reported.
///
/// The `λ_{1,2}` error is measured relative to `|λ1|`, since `λ_{1,2}`
/// itself may vanish asymptotically.
pub fn asymptotic_validation(config: &AsymptoticConfig) -> Result<StudyTable, StudyError> {
    let m = &config.material;
    let limit = ORACLE_MAX_ARGUMENT / m.delta();
    if let Some(r) = config.radii.iter().find(|r| !(**r > 0.0 && **r <= limit)) {
        return Err(StudyError::InvalidConfig(format!("radius {r} outside (0, {limit}]")));
    }
    let rows: Vec<[f64; 16]> = config
        .radii
        .par_iter()
        .map(|&r| {
            let mut nu = vec![0.0; m.n()];
            nu[0] = r;
            let (l1, l2) = eigenvalues_quadrature(m, &nu)?;
            let (l11, l12) = lambda1_parts_quadrature(m, r)?;
            let a2 = lambda2_asymptotic(m, r).value;
            let comb = lambda1_asymptotic_combined(m, r);
            let (a11, a12) = lambda1_component_asymptotics(m, r);
            let (stated, sum) = (comb.as_stated.value, comb.as_sum.value);
            Ok([
                r,
                l2,
                a2,
                rel(a2, l2),
                l2 - a2,
                l1,
                stated,
                sum,
                rel(stated, l1),
                rel(sum, l1),
                l11,
                a11.value,
                rel(a11.value, l11),
                l12,
                a12.value,
                (a12.value - l12).abs() / l1.abs(),
            ])
        })
        .collect::<Result<_, StudyError>>()?;

    let names = [
        "lambda2_exact",
        "lambda2_asymptotic",
        "lambda2_rel_error",
        "lambda2_difference",
        "lambda1_exact",
        "lambda1_as_stated",
        "lambda1_as_sum",
        "lambda1_rel_error_as_stated",
        "lambda1_rel_error_as_sum",
        "lambda11_exact",
        "lambda11_asymptotic",
        "lambda11_rel_error",
        "lambda12_exact",
        "lambda12_asymptotic",
        "lambda12_error_rel_lambda1",
    ];
    let metrics = names.iter().enumerate().map(|(i, name)| column(name, rows.iter().map(|r| r[i + 1]).collect())).collect();

    let last = rows.last().map(|r| (r[8], r[9]));
    let better = match last {
        Some((stated, sum)) if stated < sum => "as_stated",
        _ => "as_sum",
    };
    let mut meta = metadata_from(config);
    meta.insert("lambda1_better_form".to_string(), Value::from(better));
    StudyTable::new(StudyKind::AsymptoticValidation, column("radius", rows.iter().map(|r| r[0]).collect()), metrics, meta)
}
