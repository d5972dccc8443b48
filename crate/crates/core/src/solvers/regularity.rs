//! Predicted spatial and temporal regularity of solutions.

use serde::{Deserialize, Serialize};

use super::OperatorSelector;
use crate::Real;

/// Slack for floor/ceil of index ratios computed in floating point.
const INDEX_SLACK: f64 = 1e-12;

/// Sobolev indices of the data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "snake_case")]
pub enum ProblemIndices {
    /// `b ∈ H^s`.
    Equilibrium { s: f64 },
    /// `f ∈ H^{s1}`, `g ∈ H^{s2}`.
    Homogeneous { s1: f64, s2: f64 },
    /// `b ∈ H^s`.
    Forced { s: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum TemporalClass {
    Infinite,
    Finite { p: u32 },
    NotEstablished,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularityPrediction {
    /// Sobolev index of the solution.
    pub spatial_index: f64,
    /// Index at which the Gâteaux class is stated.
    pub q: f64,
    /// The Gâteaux class holds for every index strictly below `q` only.
    pub q_strict: bool,
    /// Time regularity as a map into `H^q`.
    pub gateaux: TemporalClass,
    /// Classical time regularity of `u(x, ·)`.
    pub classical: TemporalClass,
    /// The classical class relies on a Hölder assumption on the data.
    pub holder_assumed: bool,
}

/// `(β − n)` for the operator; Navier counts as the formal limit `β = n + 2`.
fn excess<T: Real>(op: &OperatorSelector<T>) -> f64 {
    match op {
        OperatorSelector::Peridynamic(m) => m.beta().to_f64_lossy() - m.n() as f64,
        OperatorSelector::Navier { .. } => 2.0,
    }
}

fn floor_slack(x: f64) -> i64 {
    (x + INDEX_SLACK).floor() as i64
}

/// Largest integer `p` with `p < x`.
fn below(x: f64) -> i64 {
    (x - INDEX_SLACK).ceil() as i64 - 1
}

fn finite_or_none(p: i64, min: i64, offset: i64) -> TemporalClass {
    if p >= min {
        TemporalClass::Finite { p: (p + offset) as u32 }
    } else {
        TemporalClass::NotEstablished
    }
}

/// Predicted regularity for the given data indices.
///
/// `q` defaults to the spatial index of the solution. With the default and
/// `β = n`, the Gâteaux class is reported for every `q` below that index.
pub fn predicted_regularity<T: Real>(op: &OperatorSelector<T>, indices: ProblemIndices, q: Option<f64>) -> RegularityPrediction {
    let n = op.n() as f64;
    let e = excess(op);
    let g = e / 2.0;
    let at_n = e.abs() <= INDEX_SLACK;
    let above = e > INDEX_SLACK;
    let smooth_below = !above && !at_n;

    match indices {
        ProblemIndices::Equilibrium { s } => RegularityPrediction {
            spatial_index: s + e.max(0.0),
            q: q.unwrap_or(s + e.max(0.0)),
            q_strict: false,
            gateaux: TemporalClass::NotApplicable,
            classical: TemporalClass::NotApplicable,
            holder_assumed: false,
        },
        ProblemIndices::Homogeneous { s1, s2 } => {
            let spatial = s1.min(s2 + g.max(0.0));
            let (qv, q_strict, gateaux) = if smooth_below {
                let qv = q.unwrap_or(spatial);
                (qv, false, if qv <= spatial + INDEX_SLACK { TemporalClass::Infinite } else { TemporalClass::NotEstablished })
            } else if at_n {
                match q {
                    None => (spatial, true, TemporalClass::Infinite),
                    Some(qv) => (qv, false, if qv < spatial - INDEX_SLACK { TemporalClass::Infinite } else { TemporalClass::NotEstablished }),
                }
            } else {
                let qv = q.unwrap_or(spatial);
                let p = floor_slack((s1 - qv) / g - 1.0).min(floor_slack((s2 - qv) / g));
                (qv, false, finite_or_none(p, 1, 1))
            };
            let classical = if smooth_below {
                TemporalClass::Infinite
            } else if at_n {
                if s1 > n && s2 > n { TemporalClass::Infinite } else { TemporalClass::NotEstablished }
            } else {
                let p = below((s1 - n) / g).min(below((s2 - n) / g + 1.0));
                finite_or_none(p, 0, 0)
            };
            RegularityPrediction { spatial_index: spatial, q: qv, q_strict, gateaux, classical, holder_assumed: smooth_below }
        }
        ProblemIndices::Forced { s } => {
            let spatial = s + e.max(0.0);
            let (qv, q_strict, gateaux) = if smooth_below {
                let qv = q.unwrap_or(s);
                (qv, false, if qv <= s + INDEX_SLACK { TemporalClass::Infinite } else { TemporalClass::NotEstablished })
            } else if at_n {
                match q {
                    None => (s, true, TemporalClass::Infinite),
                    Some(qv) => (qv, false, if qv < s - INDEX_SLACK { TemporalClass::Infinite } else { TemporalClass::NotEstablished }),
                }
            } else {
                let qv = q.unwrap_or(s);
                (qv, false, finite_or_none(floor_slack((s - qv) / g + 1.0), 1, 1))
            };
            let classical = if smooth_below {
                TemporalClass::Infinite
            } else if at_n {
                if s > n { TemporalClass::Infinite } else { TemporalClass::NotEstablished }
            } else {
                finite_or_none(below((s - n) / g + 2.0), 0, 0)
            };
            RegularityPrediction { spatial_index: spatial, q: qv, q_strict, gateaux, classical, holder_assumed: smooth_below }
        }
    }
}
