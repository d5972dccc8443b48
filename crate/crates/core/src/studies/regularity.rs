//! Fitted coefficient decay of solution channels against the predicted
//! Sobolev gain.
//!
//! Each channel maps input coefficients through a function of `M_k` that
//! bounds the corresponding part of the solution:
//!
//! - equilibrium: `M_k^{-1} b̂_k`, predicted gain `max(0, β−n)`;
//! - homogeneous velocity: `(√−M_k)^{-1} ĝ_k`, gain `max(0, (β−n)/2)`;
//! - homogeneous displacement: `f̂_k`, gain 0;
//! - forced: `M_k^{-1} b̂_k`, the envelope of `(cos(√−M_k t) − I) M_k^{-1} b̂_k`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{column, metadata_from, DataConfig, ProblemData, ProblemKind, StudyError, StudyKind, StudyTable};
use crate::fields::{decay_exponent_fit, norm_sq, vec_norm, SpectralField};
use crate::multipliers::Material;
use crate::solvers::{predicted_regularity, EigenTable, OperatorSelector, ProblemIndices};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularityConfig {
    pub problem: ProblemKind,
    pub material: Material<f64>,
    pub cutoff: usize,
    #[serde(default)]
    pub data: DataConfig,
}

/// Decay fit of one channel; exponents are slopes of `log ‖û_k‖`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFit {
    pub channel: String,
    pub input_exponent: f64,
    pub output_exponent: f64,
    /// `input_exponent − output_exponent`.
    pub gain: f64,
    pub predicted_gain: f64,
    /// `−(s_out + n/2 + ε₀)` for the predicted output index.
    pub predicted_exponent: f64,
}

impl ChannelFit {
    pub fn gap(&self) -> f64 {
        self.output_exponent - self.predicted_exponent
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityOutcome {
    pub channels: Vec<ChannelFit>,
    pub table: StudyTable,
}

struct Channel {
    name: &'static str,
    input: SpectralField<f64>,
    output: SpectralField<f64>,
    input_index: f64,
    predicted_gain: f64,
}

fn map_channel<F: Fn(f64) -> f64>(table: &EigenTable<f64>, input: &SpectralField<f64>, f: F) -> SpectralField<f64> {
    input.map_modes(|k, v| if norm_sq(k) == 0 { v.to_vec() } else { table.apply_function(k, v, &f) })
}

/// Mean `log ‖û_k‖` per shell `‖k‖²`, over the shells used by the fit.
fn shell_logs(field: &SpectralField<f64>) -> Vec<(i64, f64)> {
    let k2 = (field.cutoff() * field.cutoff()) as i64;
    let mut shells: std::collections::BTreeMap<i64, (f64, usize)> = Default::default();
    for (k, v) in field.coeffs() {
        let q = norm_sq(k);
        let mag = vec_norm(v);
        if q == 0 || 16 * q < k2 || q > k2 || mag <= 0.0 {
            continue;
        }
        let e = shells.entry(q).or_insert((0.0, 0));
        e.0 += mag.ln();
        e.1 += 1;
    }
    shells.into_iter().map(|(q, (sum, count))| (q, sum / count as f64)).collect()
}

/// Fits the coefficient decay of each solution channel for synthetic data
/// from [`crate::fields::make_decay_field`].
pub fn regularity_study(config: &RegularityConfig) -> Result<RegularityOutcome, StudyError> {
    let m = config.material;
    let n = m.n();
    let excess = m.beta() - n as f64;
    let op = OperatorSelector::Peridynamic(m);
    let data = config.data.generate(config.problem, n, config.cutoff);
    let channels = match data {
        ProblemData::Equilibrium { b } | ProblemData::Forced { b } => {
            let table = op.eigen_table(&[&b])?;
            let output = map_channel(&table, &b, |l| 1.0 / l);
            let name = if config.problem == ProblemKind::Equilibrium { "solution" } else { "forcing_response" };
            vec![Channel { name, input: b, output, input_index: config.data.s, predicted_gain: excess.max(0.0) }]
        }
        ProblemData::Homogeneous { f, g } => {
            let table = op.eigen_table(&[&f, &g])?;
            let velocity = map_channel(&table, &g, |l| 1.0 / (-l).sqrt());
            vec![
                Channel {
                    name: "displacement",
                    output: f.clone(),
                    input: f,
                    input_index: config.data.s1,
                    predicted_gain: 0.0,
                },
                Channel {
                    name: "velocity",
                    input: g,
                    output: velocity,
                    input_index: config.data.s2,
                    predicted_gain: (excess / 2.0).max(0.0),
                },
            ]
        }
    };

    let offset = n as f64 / 2.0 + crate::fields::DECAY_MARGIN;
    let mut fits = Vec::new();
    let mut radius: Vec<f64> = Vec::new();
    let mut columns = Vec::new();
    for ch in &channels {
        let input_exponent = decay_exponent_fit(&ch.input)?;
        let output_exponent = decay_exponent_fit(&ch.output)?;
        fits.push(ChannelFit {
            channel: ch.name.to_string(),
            input_exponent,
            output_exponent,
            gain: input_exponent - output_exponent,
            predicted_gain: ch.predicted_gain,
            predicted_exponent: -(ch.input_index + ch.predicted_gain + offset),
        });
        let inp = shell_logs(&ch.input);
        let out = shell_logs(&ch.output);
        radius = inp.iter().map(|(q, _)| (*q as f64).sqrt()).collect();
        columns.push(column(&format!("{}_log_input", ch.name), inp.iter().map(|p| p.1).collect()));
        columns.push(column(&format!("{}_log_output", ch.name), out.iter().map(|p| p.1).collect()));
    }

    let mut meta = metadata_from(config);
    meta.insert("fits".to_string(), serde_json::to_value(&fits).map_err(|e| StudyError::InvalidTable(e.to_string()))?);
    meta.insert("decay_margin".to_string(), Value::from(crate::fields::DECAY_MARGIN));
    let d = &config.data;
    let indices = match config.problem {
        ProblemKind::Equilibrium => ProblemIndices::Equilibrium { s: d.s },
        ProblemKind::Homogeneous => ProblemIndices::Homogeneous { s1: d.s1, s2: d.s2 },
        ProblemKind::Forced => ProblemIndices::Forced { s: d.s },
    };
    let prediction = predicted_regularity(&op, indices, None);
    meta.insert("prediction".to_string(), serde_json::to_value(prediction).map_err(|e| StudyError::InvalidTable(e.to_string()))?);
    let table = StudyTable::new(StudyKind::Regularity, column("radius", radius), columns, meta)?;
    Ok(RegularityOutcome { channels: fits, table })
}
