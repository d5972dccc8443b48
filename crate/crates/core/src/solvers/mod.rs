//! Exact coefficient-space solutions of the equilibrium, homogeneous and
//! forced problems.
//!
//! Each mode `k ≠ 0` is handled in the eigenbasis of `M_k`: for any scalar
//! function `f`, `f(M_k)v = f(λ2)v + (f(λ1) − f(λ2))(d·v)d` with
//! `d = k/‖k‖`. The zero mode follows its polynomial branch.

mod regularity;

use std::collections::BTreeMap;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fields::{norm_sq, vec_norm, FieldDocument, FieldError, SpectralField};
use crate::multipliers::{eigenvalues_at_radius, Material, MultiplierError};
use crate::Real;

pub use regularity::{predicted_regularity, ProblemIndices, RegularityPrediction, TemporalClass};

/// Absolute tolerance on each component of `b̂_0` for equilibrium.
pub const ZERO_MEAN_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Multiplier(#[from] MultiplierError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("equilibrium forcing has nonzero mean (|b_0| = {magnitude:e})")]
    NonzeroMeanForcing { magnitude: f64 },
    #[error("multiplier is singular at k = {k:?}")]
    SingularMode { k: Vec<i64> },
    #[error("operator eigenvalue is not negative at |k|^2 = {norm_sq} (lambda1 = {lambda1}, lambda2 = {lambda2})")]
    NotNegative { norm_sq: i64, lambda1: f64, lambda2: f64 },
    #[error("operation requires a {expected} problem")]
    WrongProblemKind { expected: &'static str },
    #[error("time must be nonnegative, got {t}")]
    NegativeTime { t: f64 },
    #[error("derivative order must be at least 1")]
    InvalidOrder,
    #[error("dimension mismatch: operator has n = {expected}, field has n = {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Which operator acts on the fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub enum OperatorSelector<T> {
    Peridynamic(Material<T>),
    Navier { n: usize, mu: T, lambda_star: T },
}

impl<T: Real> OperatorSelector<T> {
    pub fn n(&self) -> usize {
        match self {
            Self::Peridynamic(m) => m.n(),
            Self::Navier { n, .. } => *n,
        }
    }

    /// `(λ1, λ2)` at `‖k‖² = q`.
    pub fn eigenvalues(&self, q: i64) -> Result<(T, T), SolverError> {
        let rho2 = T::from_index(q);
        match self {
            Self::Peridynamic(m) => {
                let e = eigenvalues_at_radius(m, rho2.sqrt())?;
                Ok((e.lambda1, e.lambda2))
            }
            Self::Navier { mu, lambda_star, .. } => {
                Ok((-(*lambda_star + T::lit(2.0) * *mu) * rho2, -*mu * rho2))
            }
        }
    }

    /// Eigenvalues for every distinct nonzero `‖k‖²` stored in the fields.
    ///
    /// Every entry is checked to be strictly negative.
    pub fn eigen_table(&self, fields: &[&SpectralField<T>]) -> Result<EigenTable<T>, SolverError> {
        let mut norms: Vec<i64> = Vec::new();
        for f in fields {
            if f.n() != self.n() {
                return Err(SolverError::DimensionMismatch { expected: self.n(), got: f.n() });
            }
            norms.extend(f.coeffs().keys().map(|k| norm_sq(k)).filter(|q| *q > 0));
        }
        norms.sort_unstable();
        norms.dedup();
        let entries: Vec<(i64, (T, T))> = norms
            .par_iter()
            .map(|&q| self.eigenvalues(q).map(|e| (q, e)))
            .collect::<Result<_, _>>()?;
        let one_dim = self.n() == 1;
        for (q, (l1, l2)) in &entries {
            if !(*l1 < T::zero()) || !(one_dim || *l2 < T::zero()) {
                return Err(SolverError::NotNegative {
                    norm_sq: *q,
                    lambda1: l1.to_f64_lossy(),
                    lambda2: l2.to_f64_lossy(),
                });
            }
        }
        Ok(EigenTable { n: self.n(), entries: entries.into_iter().collect() })
    }
}

/// Per-mode eigenvalues keyed by `‖k‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenTable<T> {
    n: usize,
    entries: BTreeMap<i64, (T, T)>,
}

impl<T: Real> EigenTable<T> {
    pub fn get(&self, k: &[i64]) -> (T, T) {
        self.entries[&norm_sq(k)]
    }

    /// `f(M_k) v` evaluated in the eigenbasis.
    pub fn apply_function<F: Fn(T) -> T>(&self, k: &[i64], v: &[Complex<T>], f: F) -> Vec<Complex<T>> {
        let (l1, l2) = self.get(k);
        let f1 = f(l1);
        if self.n == 1 {
            return v.iter().map(|c| c * f1).collect();
        }
        let f2 = f(l2);
        let norm = T::from_index(norm_sq(k)).sqrt();
        let d: Vec<T> = k.iter().map(|x| T::from_index(*x) / norm).collect();
        let proj: Complex<T> = d.iter().zip(v).map(|(di, vi)| vi * *di).sum();
        let gap = f1 - f2;
        v.iter().zip(&d).map(|(vi, di)| vi * f2 + proj * (gap * *di)).collect()
    }
}

fn zero_vec<T: Real>(n: usize) -> Vec<Complex<T>> {
    vec![Complex::new(T::zero(), T::zero()); n]
}

/// `cos(x + pπ/2)` and `sin(x + pπ/2)` via the quarter-period table.
fn shifted_cos_sin<T: Real>(x: T, p: u32) -> (T, T) {
    let (s, c) = x.sin_cos();
    match p % 4 {
        0 => (c, s),
        1 => (-s, c),
        2 => (-c, -s),
        _ => (s, -c),
    }
}

/// `(L u)^_k = M_k û_k`; the zero mode maps to zero.
pub fn apply_operator<T: Real>(op: &OperatorSelector<T>, f: &SpectralField<T>) -> Result<SpectralField<T>, SolverError> {
    let table = op.eigen_table(&[f])?;
    Ok(apply_with(&table, f))
}

fn apply_with<T: Real>(table: &EigenTable<T>, f: &SpectralField<T>) -> SpectralField<T> {
    f.map_modes(|k, v| if norm_sq(k) == 0 { zero_vec(v.len()) } else { table.apply_function(k, v, |l| l) })
}

/// `û_k = M_k^{-1} b̂_k` for `k ≠ 0`, `û_0 = 0`. Requires `b̂_0 = 0`.
pub fn solve_equilibrium<T: Real>(op: &OperatorSelector<T>, b: &SpectralField<T>) -> Result<SpectralField<T>, SolverError> {
    let zero_k = vec![0i64; b.n()];
    if let Some(b0) = b.get(&zero_k) {
        let worst = b0.iter().map(|c| c.re.abs().max(c.im.abs())).fold(T::zero(), T::max);
        if worst > T::lit(ZERO_MEAN_TOLERANCE) {
            return Err(SolverError::NonzeroMeanForcing { magnitude: worst.to_f64_lossy() });
        }
    }
    let table = op.eigen_table(&[b])?;
    b.try_map_modes(|k, v| {
        if norm_sq(k) == 0 {
            return Ok(zero_vec(v.len()));
        }
        let (l1, l2) = table.get(k);
        if l1 == T::zero() || (b.n() > 1 && l2 == T::zero()) {
            return Err(SolverError::SingularMode { k: k.to_vec() });
        }
        Ok(table.apply_function(k, v, |l| T::one() / l))
    })
}

/// The data of an evolution problem.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem<T> {
    Homogeneous { f: SpectralField<T>, g: SpectralField<T> },
    Forced { b: SpectralField<T> },
}

impl<T> Problem<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Homogeneous { .. } => "homogeneous",
            Self::Forced { .. } => "forced",
        }
    }
}

/// An evolution problem with its eigen-data precomputed for every mode.
#[derive(Debug, Clone)]
pub struct TimeSolution<T> {
    pub problem: Problem<T>,
    pub operator: OperatorSelector<T>,
    eigen: EigenTable<T>,
}

impl<T: Real> TimeSolution<T> {
    pub fn homogeneous(op: OperatorSelector<T>, f: SpectralField<T>, g: SpectralField<T>) -> Result<Self, SolverError> {
        if f.n() != g.n() {
            return Err(SolverError::DimensionMismatch { expected: f.n(), got: g.n() });
        }
        let eigen = op.eigen_table(&[&f, &g])?;
        Ok(Self { problem: Problem::Homogeneous { f, g }, operator: op, eigen })
    }

    pub fn forced(op: OperatorSelector<T>, b: SpectralField<T>) -> Result<Self, SolverError> {
        let eigen = op.eigen_table(&[&b])?;
        Ok(Self { problem: Problem::Forced { b }, operator: op, eigen })
    }

    pub fn eigen(&self) -> &EigenTable<T> {
        &self.eigen
    }

    fn check_time(t: T) -> Result<(), SolverError> {
        if t < T::zero() || !t.is_finite() {
            return Err(SolverError::NegativeTime { t: t.to_f64_lossy() });
        }
        Ok(())
    }

    /// `U(t)` for `t ≥ 0`.
    pub fn evaluate(&self, t: T) -> Result<SpectralField<T>, SolverError> {
        Self::check_time(t)?;
        Ok(self.evaluate_any(t))
    }

    /// `d^p U/dt^p` at `t ≥ 0`, `p ≥ 1`.
    pub fn derivative(&self, t: T, p: u32) -> Result<SpectralField<T>, SolverError> {
        Self::check_time(t)?;
        if p == 0 {
            return Err(SolverError::InvalidOrder);
        }
        Ok(self.derivative_any(t, p))
    }

    /// The solution formula at any real `t` (the formula is even/odd in `t`
    /// per mode); used for central differences around `t = 0`.
    pub(crate) fn evaluate_any(&self, t: T) -> SpectralField<T> {
        self.derivative_any(t, 0)
    }

    fn derivative_any(&self, t: T, p: u32) -> SpectralField<T> {
        let table = &self.eigen;
        let pf = T::from_index(p as i64);
        match &self.problem {
            Problem::Homogeneous { f, g } => {
                let zero = zero_vec(f.n());
                let mut out = SpectralField::zeros(f.n(), f.cutoff().max(g.cutoff()), f.real_flag() && g.real_flag());
                let keys: std::collections::BTreeSet<&Vec<i64>> = f.coeffs().keys().chain(g.coeffs().keys()).collect();
                let mut coeffs = Vec::with_capacity(keys.len());
                for k in keys {
                    let fk = f.get(k).unwrap_or(&zero);
                    let gk = g.get(k).unwrap_or(&zero);
                    let v: Vec<Complex<T>> = if norm_sq(k) == 0 {
                        match p {
                            0 => fk.iter().zip(gk).map(|(a, b)| a + b * t).collect(),
                            1 => gk.clone(),
                            _ => zero.clone(),
                        }
                    } else {
                        let cf = table.apply_function(k, fk, |l| {
                            let w = (-l).sqrt();
                            w.powf(pf) * shifted_cos_sin(w * t, p).0
                        });
                        let sg = table.apply_function(k, gk, |l| {
                            let w = (-l).sqrt();
                            w.powf(pf - T::one()) * shifted_cos_sin(w * t, p).1
                        });
                        cf.iter().zip(&sg).map(|(a, b)| a + b).collect()
                    };
                    coeffs.push((k.clone(), v));
                }
                for (k, v) in coeffs {
                    out.insert_raw(k, v);
                }
                out
            }
            Problem::Forced { b } => b.map_modes(|k, v| {
                if norm_sq(k) == 0 {
                    let factor = match p {
                        0 => t * t / T::lit(2.0),
                        1 => t,
                        2 => T::one(),
                        _ => T::zero(),
                    };
                    return v.iter().map(|c| c * factor).collect();
                }
                table.apply_function(k, v, |l| {
                    let w = (-l).sqrt();
                    let c = w.powf(pf) * shifted_cos_sin(w * t, p).0;
                    if p == 0 {
                        (c - T::one()) / l
                    } else {
                        c / l
                    }
                })
            }),
        }
    }

    /// `Σ_{k≠0} ‖U̇_k‖² + U_k^*(−M_k)U_k`; homogeneous problems only.
    pub fn energy(&self, t: T) -> Result<T, SolverError> {
        if !matches!(self.problem, Problem::Homogeneous { .. }) {
            return Err(SolverError::WrongProblemKind { expected: "homogeneous" });
        }
        let u = self.evaluate_any(t);
        let du = self.derivative_any(t, 1);
        let mut total = T::zero();
        for (k, v) in u.coeffs() {
            if norm_sq(k) == 0 {
                continue;
            }
            let kinetic = du.get(k).map(|d| vec_norm(d).powi(2)).unwrap_or(T::zero());
            let mv = self.eigen.apply_function(k, v, |l| -l);
            let potential: T = v.iter().zip(&mv).map(|(a, b)| (a.conj() * b).re).sum();
            total += kinetic + potential;
        }
        Ok(total)
    }
}

/// `U(t)` for the homogeneous problem with data `(f, g)`.
pub fn evolve_homogeneous<T: Real>(
    op: &OperatorSelector<T>,
    f: &SpectralField<T>,
    g: &SpectralField<T>,
    t: T,
) -> Result<SpectralField<T>, SolverError> {
    TimeSolution::homogeneous(*op, f.clone(), g.clone())?.evaluate(t)
}

/// `U(t)` for the forced problem with zero initial data.
pub fn evolve_forced<T: Real>(op: &OperatorSelector<T>, b: &SpectralField<T>, t: T) -> Result<SpectralField<T>, SolverError> {
    TimeSolution::forced(*op, b.clone())?.evaluate(t)
}

pub fn time_derivative<T: Real>(sol: &TimeSolution<T>, t: T, p: u32) -> Result<SpectralField<T>, SolverError> {
    sol.derivative(t, p)
}

pub fn mode_energy<T: Real>(sol: &TimeSolution<T>, t: T) -> Result<T, SolverError> {
    sol.energy(t)
}

/// Field document with the `{operator, problem, t}` header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDocument {
    pub operator: OperatorSelector<f64>,
    pub problem: String,
    pub t: Option<f64>,
    #[serde(flatten)]
    pub field: FieldDocument,
}
