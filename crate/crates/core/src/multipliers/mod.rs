//! Fourier multipliers of the peridynamic operator.
//!
//! `M(ν) = α_b1 I + (α_b2 + α_s) ν⊗ν` is stored by its eigenstructure:
//! `λ1` on the line spanned by `ν`, `λ2` on the orthogonal complement.

mod oracle;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::QuadratureError;
use crate::specfun::{gamma_fn, pfq, SeriesResult, SpecfunError};
use crate::Real;

pub use oracle::{eigenvalues_quadrature, lambda1_parts_quadrature, multiplier_quadrature, ORACLE_MAX_ARGUMENT, ORACLE_MAX_DIM};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MultiplierError {
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("frequency vector has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("hypergeometric evaluation lost precision (condition {condition:e})")]
    PrecisionLoss { condition: f64 },
    #[error("the two closed forms of lambda1 disagree: {first} vs {second}")]
    Consistency { first: f64, second: f64 },
    #[error("quadrature oracle failed: {0}")]
    Quadrature(#[from] QuadratureError),
    #[error("outside the quadrature oracle envelope: {0}")]
    OutsideEnvelope(String),
    #[error("function undefined at eigenvalue {eigenvalue}")]
    Domain { eigenvalue: f64 },
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

/// Parameters `(n, δ, β, μ, λ*)` of the operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MaterialSpec<T>", into = "MaterialSpec<T>")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct Material<T> {
    n: usize,
    delta: T,
    beta: T,
    mu: T,
    lambda_star: T,
}

/// Unvalidated wire form of [`Material`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec<T> {
    pub n: usize,
    pub delta: T,
    pub beta: T,
    pub mu: T,
    pub lambda_star: T,
}

impl<T: Real> TryFrom<MaterialSpec<T>> for Material<T> {
    type Error = MultiplierError;
    fn try_from(s: MaterialSpec<T>) -> Result<Self, Self::Error> {
        Material::new(s.n, s.delta, s.beta, s.mu, s.lambda_star)
    }
}

impl<T: Real> From<Material<T>> for MaterialSpec<T> {
    fn from(m: Material<T>) -> Self {
        MaterialSpec { n: m.n, delta: m.delta, beta: m.beta, mu: m.mu, lambda_star: m.lambda_star }
    }
}

impl<T: Real> Material<T> {
    pub fn new(n: usize, delta: T, beta: T, mu: T, lambda_star: T) -> Result<Self, MultiplierError> {
        let bad = |msg: String| Err(MultiplierError::InvalidMaterial(msg));
        if n == 0 {
            return bad("dimension n must be at least 1".into());
        }
        if !(delta.is_finite() && delta > T::zero()) {
            return bad(format!("horizon delta must be positive and finite, got {delta}"));
        }
        if !beta.is_finite() {
            return bad(format!("beta must be finite, got {beta}"));
        }
        let limit = T::from_index(n as i64 + 2);
        if beta >= limit {
            return bad(format!("beta < n+2 is required, got beta = {beta} with n+2 = {limit}"));
        }
        if !(mu.is_finite() && mu > T::zero()) {
            return bad(format!("mu must be positive and finite, got {mu}"));
        }
        if !lambda_star.is_finite() {
            return bad(format!("lambda_star must be finite, got {lambda_star}"));
        }
        Ok(Self { n, delta, beta, mu, lambda_star })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn delta(&self) -> T {
        self.delta
    }
    pub fn beta(&self) -> T {
        self.beta
    }
    pub fn mu(&self) -> T {
        self.mu
    }
    pub fn lambda_star(&self) -> T {
        self.lambda_star
    }

    /// Copy with a different horizon.
    pub fn with_delta(&self, delta: T) -> Result<Self, MultiplierError> {
        Self::new(self.n, delta, self.beta, self.mu, self.lambda_star)
    }

    /// Copy with a different kernel exponent.
    pub fn with_beta(&self, beta: T) -> Result<Self, MultiplierError> {
        Self::new(self.n, self.delta, beta, self.mu, self.lambda_star)
    }

    pub(crate) fn dim_f(&self) -> T {
        T::from_index(self.n as i64)
    }

    fn check_dim(&self, nu: &[T]) -> Result<(), MultiplierError> {
        if nu.len() != self.n {
            return Err(MultiplierError::DimensionMismatch { expected: self.n, got: nu.len() });
        }
        Ok(())
    }
}

/// `M = λ1·P + λ2·(I − P)` with `P` the projector onto `direction`.
///
/// `direction == None` marks a multiple of the identity (`λ1 = λ2`), which
/// is how `M(0) = 0` is represented.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierMatrix<T> {
    pub dim: usize,
    pub lambda1: T,
    pub lambda2: T,
    pub direction: Option<Vec<T>>,
}

impl<T: Real> MultiplierMatrix<T> {
    pub fn zero(dim: usize) -> Self {
        Self::scalar(dim, T::zero())
    }

    pub fn scalar(dim: usize, value: T) -> Self {
        Self { dim, lambda1: value, lambda2: value, direction: None }
    }

    /// Builds the matrix for frequency `nu`; a zero `nu` gives `λ1·I`.
    pub fn from_eigen(nu: &[T], lambda1: T, lambda2: T) -> Self {
        match unit_direction(nu) {
            Some(d) => Self { dim: nu.len(), lambda1, lambda2, direction: Some(d) },
            None => Self::scalar(nu.len(), lambda1),
        }
    }

    /// Row-major dense view.
    pub fn dense(&self) -> Vec<T> {
        let n = self.dim;
        let mut out = vec![T::zero(); n * n];
        for i in 0..n {
            out[i * n + i] = self.lambda2;
        }
        match &self.direction {
            Some(d) => {
                let gap = self.lambda1 - self.lambda2;
                for i in 0..n {
                    for j in 0..n {
                        out[i * n + j] += gap * d[i] * d[j];
                    }
                }
            }
            None => {
                for i in 0..n {
                    out[i * n + i] = self.lambda1;
                }
            }
        }
        out
    }

    /// `M v` for a complex vector.
    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        match &self.direction {
            None => v.iter().map(|x| x * self.lambda1).collect(),
            Some(d) => {
                let proj: Complex<T> = d.iter().zip(v).map(|(di, vi)| vi * *di).sum();
                let gap = self.lambda1 - self.lambda2;
                v.iter()
                    .zip(d)
                    .map(|(vi, di)| vi * self.lambda2 + proj * (gap * *di))
                    .collect()
            }
        }
    }

    /// `λ1·λ2^{n−1}`.
    pub fn det(&self) -> T {
        match self.direction {
            None => self.lambda1.powi(self.dim as i32),
            Some(_) => self.lambda1 * self.lambda2.powi(self.dim as i32 - 1),
        }
    }

    /// Spectral norm, `max(|λ1|, |λ2|)` (only `λ1` in one dimension).
    pub fn operator_norm(&self) -> T {
        if self.dim == 1 || self.direction.is_none() {
            self.lambda1.abs()
        } else {
            self.lambda1.abs().max(self.lambda2.abs())
        }
    }

    /// Spectral norm of `self − other` for matrices sharing a direction.
    pub fn distance(&self, other: &Self) -> T {
        let d1 = (self.lambda1 - other.lambda1).abs();
        let d2 = (self.lambda2 - other.lambda2).abs();
        if self.dim == 1 || (self.direction.is_none() && other.direction.is_none()) {
            d1
        } else {
            d1.max(d2)
        }
    }
}

fn unit_direction<T: Real>(nu: &[T]) -> Option<Vec<T>> {
    let norm = euclidean_norm(nu);
    if norm == T::zero() {
        None
    } else {
        Some(nu.iter().map(|x| *x / norm).collect())
    }
}

pub(crate) fn euclidean_norm<T: Real>(nu: &[T]) -> T {
    // Scaled to avoid overflow for extreme inputs.
    let scale = nu.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
    if scale == T::zero() {
        return T::zero();
    }
    let s: T = nu.iter().map(|x| (*x / scale).powi(2)).sum();
    scale * s.sqrt()
}

/// `c^{δ,β} = 2(n+2−β)Γ(n/2+1) / (π^{n/2} δ^{n+2−β})`.
pub fn scaling_constant<T: Real>(m: &Material<T>) -> T {
    let n = m.dim_f();
    let two = T::lit(2.0);
    let order = n + two - m.beta;
    let g = gamma_fn(n / two + T::one()).expect("n/2 + 1 is positive");
    two * order * g / (T::PI().powf(n / two) * m.delta.powf(order))
}

/// Where an eigenvalue pair came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EigenSource {
    Hypergeometric,
    QuadratureFallback,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalues<T> {
    pub lambda1: T,
    pub lambda2: T,
    pub source: EigenSource,
}

/// All hypergeometric quantities at one radius, with condition numbers.
#[derive(Debug, Clone, Copy)]
struct HyperEval<T> {
    alpha_b1: T,
    alpha_b2: T,
    alpha_s: T,
    lambda1: T,
    lambda1_alt: T,
    lambda2: T,
    /// Largest of the three relative condition estimates.
    condition: T,
}

fn series<T: Real>(numer: &[T], denom: &[T], z: T) -> Result<SeriesResult<T>, MultiplierError> {
    pfq(numer, denom, z).map_err(|e| match e {
        SpecfunError::NonConvergence { .. } => MultiplierError::PrecisionLoss { condition: f64::INFINITY },
        other => MultiplierError::Specfun(other),
    })
}

fn hyper_eval<T: Real>(m: &Material<T>, rho: T) -> Result<HyperEval<T>, MultiplierError> {
    let one = T::one();
    let two = T::lit(2.0);
    let n = m.dim_f();
    let a = (n + two - m.beta) / two;
    let z = -(rho * rho * m.delta * m.delta) / T::lit(4.0);
    let b_outer = (n + T::lit(4.0)) / two;
    let b_inner = (n + two) / two;

    let f23 = series(&[one, a], &[two, b_outer, a + one], z)?;
    let f12a = series(&[a], &[b_outer, a + one], z)?;
    let f12b = series(&[a], &[b_inner, a + one], z)?;
    let f34 = series(&[one, T::lit(2.5), a], &[two, T::lit(1.5), b_outer, a + one], z)?;

    let mu = m.mu;
    let ls = m.lambda_star - mu;
    let rho2 = rho * rho;
    let alpha_b1 = -mu * rho2 * f23.value;
    let alpha_b2 = -two * mu * f12a.value;
    let alpha_s = -ls * f12b.value * f12b.value;
    let lambda2 = alpha_b1;
    let lambda1 = alpha_b1 + (alpha_b2 + alpha_s) * rho2;
    let lambda1_alt = -rho2 * (T::lit(3.0) * mu * f34.value + ls * f12b.value * f12b.value);

    // Absolute error of each series is about eps times its largest
    // intermediate; these are the magnitudes that multiply eps.
    let eps = T::epsilon();
    let sq_mag = two * f12b.value.abs() * f12b.max_term_magnitude
        + eps * f12b.max_term_magnitude * f12b.max_term_magnitude;
    let mag2 = mu * rho2 * f23.max_term_magnitude;
    let mag1 = mag2 + two * mu * rho2 * f12a.max_term_magnitude + ls.abs() * rho2 * sq_mag;
    let mag_alt = rho2 * (T::lit(3.0) * mu * f34.max_term_magnitude + ls.abs() * sq_mag);
    let rel = |mag: T, v: T| if v == T::zero() { T::infinity() } else { mag / v.abs() };
    let condition = rel(mag1, lambda1).max(rel(mag2, lambda2)).max(rel(mag_alt, lambda1_alt));

    Ok(HyperEval { alpha_b1, alpha_b2, alpha_s, lambda1, lambda1_alt, lambda2, condition })
}

/// Largest condition estimate for which the closed forms are trusted:
/// `16·eps·condition` must stay below [`Real::accuracy_target`].
pub fn condition_limit<T: Real>() -> T {
    T::accuracy_target() / (T::lit(16.0) * T::epsilon())
}

fn guarded_hyper<T: Real>(m: &Material<T>, rho: T) -> Result<HyperEval<T>, MultiplierError> {
    let h = hyper_eval(m, rho)?;
    if rho != T::zero() && !(h.condition <= condition_limit::<T>()) {
        return Err(MultiplierError::PrecisionLoss { condition: h.condition.to_f64_lossy() });
    }
    Ok(h)
}

/// `(α_b1, α_b2, α_s)` from the hypergeometric representation.
pub fn multiplier_coefficients<T: Real>(m: &Material<T>, nu: &[T]) -> Result<(T, T, T), MultiplierError> {
    m.check_dim(nu)?;
    let h = guarded_hyper(m, euclidean_norm(nu))?;
    Ok((h.alpha_b1, h.alpha_b2, h.alpha_s))
}

/// `M(ν)` from the hypergeometric representation; no fallback.
pub fn multiplier_matrix<T: Real>(m: &Material<T>, nu: &[T]) -> Result<MultiplierMatrix<T>, MultiplierError> {
    m.check_dim(nu)?;
    let rho = euclidean_norm(nu);
    if rho == T::zero() {
        return Ok(MultiplierMatrix::zero(m.n));
    }
    let h = guarded_hyper(m, rho)?;
    Ok(MultiplierMatrix::from_eigen(nu, h.lambda1, h.lambda2))
}

/// Eigenvalues at radius `rho = ‖ν‖`, falling back to quadrature when the
/// closed forms are ill-conditioned.
pub fn eigenvalues_at_radius<T: Real>(m: &Material<T>, rho: T) -> Result<Eigenvalues<T>, MultiplierError> {
    if rho == T::zero() {
        return Ok(Eigenvalues { lambda1: T::zero(), lambda2: T::zero(), source: EigenSource::Hypergeometric });
    }
    match guarded_hyper(m, rho) {
        Ok(h) => {
            let tol = T::accuracy_target() * h.lambda1.abs();
            if (h.lambda1 - h.lambda1_alt).abs() > tol {
                return Err(MultiplierError::Consistency {
                    first: h.lambda1.to_f64_lossy(),
                    second: h.lambda1_alt.to_f64_lossy(),
                });
            }
            Ok(Eigenvalues { lambda1: h.lambda1, lambda2: h.lambda2, source: EigenSource::Hypergeometric })
        }
        Err(MultiplierError::PrecisionLoss { condition }) => {
            let (lambda1, lambda2) = oracle::eigenvalues_at_radius(m, rho).map_err(|e| match e {
                MultiplierError::OutsideEnvelope(_) => MultiplierError::PrecisionLoss { condition },
                other => other,
            })?;
            Ok(Eigenvalues { lambda1, lambda2, source: EigenSource::QuadratureFallback })
        }
        Err(e) => Err(e),
    }
}

/// `λ1(ν)`, `λ2(ν)`, cross-checked between the two closed forms of `λ1`.
pub fn eigenvalues_exact<T: Real>(m: &Material<T>, nu: &[T]) -> Result<Eigenvalues<T>, MultiplierError> {
    m.check_dim(nu)?;
    eigenvalues_at_radius(m, euclidean_norm(nu))
}

/// Navier multiplier: `λ1 = −(λ*+2μ)‖ν‖²`, `λ2 = −μ‖ν‖²`.
pub fn navier_reference<T: Real>(mu: T, lambda_star: T, nu: &[T]) -> MultiplierMatrix<T> {
    let rho2: T = nu.iter().map(|x| *x * *x).sum();
    MultiplierMatrix::from_eigen(nu, -(lambda_star + T::lit(2.0) * mu) * rho2, -mu * rho2)
}

/// `f(M) = f(λ1)·P + f(λ2)·(I − P)`.
///
/// A non-finite `f(λ)` is a domain error.
pub fn matrix_function<T: Real, F: Fn(T) -> T>(
    m: &MultiplierMatrix<T>,
    f: F,
) -> Result<MultiplierMatrix<T>, MultiplierError> {
    let eval = |lambda: T| {
        let v = f(lambda);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(MultiplierError::Domain { eigenvalue: lambda.to_f64_lossy() })
        }
    };
    match &m.direction {
        None => Ok(MultiplierMatrix::scalar(m.dim, eval(m.lambda1)?)),
        Some(d) => {
            let l2 = if m.dim == 1 { f(m.lambda2) } else { eval(m.lambda2)? };
            Ok(MultiplierMatrix { dim: m.dim, lambda1: eval(m.lambda1)?, lambda2: l2, direction: Some(d.clone()) })
        }
    }
}

/// Outcome of [`validate_negativity`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegativityReport {
    pub passed: bool,
    pub cutoff: usize,
    /// Lattice points checked.
    pub checked: usize,
    /// Lattice points with `λ1 ≥ 0` or `λ2 ≥ 0`.
    pub offenders: Vec<Vec<i64>>,
}

/// Checks `λ1(k) < 0` and `λ2(k) < 0` on `0 < ‖k‖_∞ ≤ K`.
///
/// Evaluation failures are errors; sign failures go in the report.
pub fn validate_negativity<T: Real>(m: &Material<T>, cutoff: usize) -> Result<NegativityReport, MultiplierError> {
    let points = crate::fields::lattice_points(m.n, cutoff);
    let mut norms: Vec<i64> = points.iter().map(|k| k.iter().map(|x| x * x).sum()).collect();
    norms.sort_unstable();
    norms.dedup();
    norms.retain(|&q| q > 0);
    let signs: Vec<(i64, bool)> = norms
        .par_iter()
        .map(|&q| {
            let rho = T::from_index(q).sqrt();
            eigenvalues_at_radius(m, rho).map(|e| {
                (q, e.lambda1 < T::zero() && e.lambda2 < T::zero())
            })
        })
        .collect::<Result<_, _>>()?;
    let bad: std::collections::BTreeSet<i64> = signs.iter().filter(|(_, ok)| !ok).map(|(q, _)| *q).collect();
    let offenders: Vec<Vec<i64>> = points
        .iter()
        .filter(|k| {
            let q: i64 = k.iter().map(|x| x * x).sum();
            bad.contains(&q)
        })
        .cloned()
        .collect();
    let checked = points.iter().filter(|k| k.iter().any(|x| *x != 0)).count();
    Ok(NegativityReport { passed: offenders.is_empty(), cutoff, checked, offenders })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mat(n: usize, delta: f64, beta: f64, mu: f64, ls: f64) -> Material<f64> {
        Material::new(n, delta, beta, mu, ls).unwrap()
    }

    #[test]
    fn material_validation() {
        assert!(Material::new(0, 1.0, 0.0, 1.0, 1.0).is_err());
        assert!(Material::new(1, 0.0, 0.0, 1.0, 1.0).is_err());
        assert!(Material::new(1, 1.0, 3.0, 1.0, 1.0).is_err());
        assert!(Material::new(1, 1.0, 2.99, 1.0, 1.0).is_ok());
        assert!(Material::new(1, 1.0, 0.0, 0.0, 1.0).is_err());
        let err = Material::new(2, 1.0, 4.0, 1.0, 1.0).unwrap_err().to_string();
        assert!(err.contains("beta < n+2"), "{err}");
    }

    #[test]
    fn material_serde_validates() {
        let ok: Material<f64> =
            serde_json::from_str(r#"{"n":1,"delta":1.0,"beta":1.0,"mu":1.0,"lambda_star":1.0}"#).unwrap();
        assert_eq!(ok, mat(1, 1.0, 1.0, 1.0, 1.0));
        let bad = serde_json::from_str::<Material<f64>>(r#"{"n":1,"delta":1.0,"beta":3.0,"mu":1.0,"lambda_star":1.0}"#);
        assert!(bad.is_err());
        let unknown =
            serde_json::from_str::<Material<f64>>(r#"{"n":1,"delta":1.0,"beta":1.0,"mu":1.0,"lambda_star":1.0,"x":0}"#);
        assert!(unknown.is_err());
    }

    #[test]
    fn scaling_constant_values() {
        assert_relative_eq!(scaling_constant(&mat(1, 1.0, 1.0, 1.0, 1.0)), 2.0, max_relative = 1e-14);
        assert_relative_eq!(
            scaling_constant(&mat(2, 1.0, 2.0, 1.0, 1.0)),
            4.0 / std::f64::consts::PI,
            max_relative = 1e-14
        );
        assert_relative_eq!(scaling_constant(&mat(1, 2.0, 1.0, 1.0, 1.0)), 0.5, max_relative = 1e-14);
    }

    #[test]
    fn coefficients_at_zero() {
        let m = mat(2, 1.0, 1.0, 1.5, 4.0);
        let (b1, b2, s) = multiplier_coefficients(&m, &[0.0, 0.0]).unwrap();
        assert_eq!(b1, 0.0);
        assert_eq!(b2, -3.0);
        assert_eq!(s, -2.5);
        let (_, _, s) = multiplier_coefficients(&mat(1, 1.0, 1.0, 1.0, 1.0), &[1.0]).unwrap();
        assert_eq!(s, 0.0);
        assert_eq!(multiplier_matrix(&m, &[0.0, 0.0]).unwrap(), MultiplierMatrix::zero(2));
    }

    #[test]
    fn reference_eigenvalues() {
        // Values from an independent arbitrary-precision evaluation.
        let cases = [
            (mat(1, 1.0, 0.0, 1.0, 1.0), vec![2.0], -9.81632315856886, -3.55128320877575),
            (mat(2, 1.0, 2.0, 1.0, 2.0), vec![1.0, 0.0], -3.77994860236586, -0.979453323840036),
            (mat(2, 1.0, 1.0, 1.0, 3.0), vec![2.0, 1.0], -16.7575984049511, -4.41931757568576),
            (mat(3, 0.5, 3.5, 1.0, 2.0), vec![1.0, 1.0, 0.0], -7.84024824088967, -1.98478369049801),
        ];
        for (m, nu, l1, l2) in cases {
            let e = eigenvalues_exact(&m, &nu).unwrap();
            assert_eq!(e.source, EigenSource::Hypergeometric);
            assert_relative_eq!(e.lambda1, l1, max_relative = 1e-12);
            assert_relative_eq!(e.lambda2, l2, max_relative = 1e-12);
        }
    }

    #[test]
    fn small_frequency_limit_is_navier() {
        let m = mat(2, 1.0, 1.0, 1.3, 2.1);
        let nu = [1e-4, 0.0];
        let e = eigenvalues_exact(&m, &nu).unwrap();
        let rho2 = 1e-8;
        assert_relative_eq!(e.lambda1 / rho2, -(2.1 + 2.0 * 1.3), max_relative = 1e-6);
        assert_relative_eq!(e.lambda2 / rho2, -1.3, max_relative = 1e-6);
    }

    #[test]
    fn symmetry_and_eigenvectors() {
        let m = mat(3, 1.0, 2.5, 1.0, 2.0);
        let nu = [1.0, -2.0, 0.5];
        let mm = multiplier_matrix(&m, &nu).unwrap();
        let neg = multiplier_matrix(&m, &[-1.0, 2.0, -0.5]).unwrap();
        let d = mm.dense();
        let dn = neg.dense();
        for i in 0..3 {
            for j in 0..3 {
                assert!((d[i * 3 + j] - d[j * 3 + i]).abs() < 1e-14);
                assert!((d[i * 3 + j] - dn[i * 3 + j]).abs() < 1e-14);
            }
        }
        // M ν = λ1 ν, M ν⊥ = λ2 ν⊥
        let v: Vec<Complex<f64>> = nu.iter().map(|x| Complex::new(*x, 0.0)).collect();
        let mv = mm.apply(&v);
        for i in 0..3 {
            assert!((mv[i].re - mm.lambda1 * nu[i]).abs() < 1e-12);
        }
        let perp = [2.0, 1.0, 0.0];
        let w: Vec<Complex<f64>> = perp.iter().map(|x| Complex::new(*x, 0.0)).collect();
        let mw = mm.apply(&w);
        for i in 0..3 {
            assert!((mw[i].re - mm.lambda2 * perp[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn determinant_matches_dense() {
        let m = mat(2, 1.0, 1.0, 1.0, 3.0);
        let mm = multiplier_matrix(&m, &[2.0, 1.0]).unwrap();
        let d = mm.dense();
        let det = d[0] * d[3] - d[1] * d[2];
        assert_relative_eq!(det, mm.det(), max_relative = 1e-12);
    }

    #[test]
    fn rotation_equivariance() {
        let m = mat(2, 1.0, 1.5, 1.0, 2.0);
        let nu = [1.2, 0.7];
        let th = 0.83_f64;
        let (c, s) = (th.cos(), th.sin());
        let rnu = [c * nu[0] - s * nu[1], s * nu[0] + c * nu[1]];
        let a = multiplier_matrix(&m, &nu).unwrap().dense();
        let b = multiplier_matrix(&m, &rnu).unwrap().dense();
        let r = [c, -s, s, c];
        // R A Rᵀ
        let mut rar = [0.0; 4];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        rar[i * 2 + j] += r[i * 2 + k] * a[k * 2 + l] * r[j * 2 + l];
                    }
                }
            }
        }
        for i in 0..4 {
            assert!((rar[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn radial_dependence() {
        let m = mat(2, 1.0, 0.5, 1.0, 1.5);
        let a = eigenvalues_exact(&m, &[3.0, 4.0]).unwrap();
        let b = eigenvalues_exact(&m, &[5.0, 0.0]).unwrap();
        assert_relative_eq!(a.lambda1, b.lambda1, max_relative = 1e-12);
        assert_relative_eq!(a.lambda2, b.lambda2, max_relative = 1e-12);
    }

    #[test]
    fn large_argument_falls_back() {
        let m = mat(1, 1.0, 0.0, 1.0, 1.0);
        assert!(matches!(multiplier_matrix(&m, &[60.0]), Err(MultiplierError::PrecisionLoss { .. })));
        let e = eigenvalues_exact(&m, &[60.0]).unwrap();
        assert_eq!(e.source, EigenSource::QuadratureFallback);
        assert!(e.lambda1 < 0.0 && e.lambda2 < 0.0);
    }

    #[test]
    fn outside_envelope_is_precision_loss() {
        let m = mat(1, 1.0, 0.0, 1.0, 1.0);
        assert!(matches!(eigenvalues_exact(&m, &[1000.0]), Err(MultiplierError::PrecisionLoss { .. })));
    }

    #[test]
    fn navier_values() {
        let nav = navier_reference(1.0, 1.0, &[1.0, 0.0]);
        assert_eq!(nav.lambda1, -3.0);
        assert_eq!(nav.lambda2, -1.0);
        assert_eq!(navier_reference(1.0, 1.0, &[0.0, 0.0]), MultiplierMatrix::zero(2));
        let a = navier_reference(1.3, 0.4, &[0.3, -0.2]);
        let b = navier_reference(1.3, 0.4, &[0.6, -0.4]);
        assert_eq!(b.lambda1, 4.0 * a.lambda1);
        assert_eq!(b.lambda2, 4.0 * a.lambda2);
    }

    #[test]
    fn matrix_functions() {
        let m = mat(2, 1.0, 1.0, 1.0, 3.0);
        let mm = multiplier_matrix(&m, &[2.0, 1.0]).unwrap();
        assert_eq!(matrix_function(&mm, |l| l).unwrap(), mm);
        let c0 = matrix_function(&mm, |l: f64| ((-l).sqrt() * 0.0).cos()).unwrap();
        let d = c0.dense();
        assert!((d[0] - 1.0).abs() < 1e-15 && d[1].abs() < 1e-15 && (d[3] - 1.0).abs() < 1e-15);

        let hand = MultiplierMatrix { dim: 2, lambda1: -4.0, lambda2: -1.0, direction: Some(vec![1.0, 0.0]) };
        let pi = std::f64::consts::PI;
        let c = matrix_function(&hand, |l: f64| ((-l).sqrt() * pi).cos()).unwrap().dense();
        assert!((c[0] - 1.0).abs() < 1e-14 && (c[3] + 1.0).abs() < 1e-14 && c[1].abs() < 1e-14);

        assert!(matches!(matrix_function(&MultiplierMatrix::zero(2), |l: f64| 1.0 / l), Err(MultiplierError::Domain { .. })));
        let f0 = matrix_function(&MultiplierMatrix::<f64>::zero(2), |l| l.cos()).unwrap();
        assert_eq!(f0, MultiplierMatrix::scalar(2, 1.0));

        for t in [0.0, 0.3, 1.7, 9.5] {
            let cs = matrix_function(&mm, |l: f64| ((-l).sqrt() * t).cos()).unwrap();
            let sn = matrix_function(&mm, |l: f64| ((-l).sqrt() * t).sin()).unwrap();
            assert!(cs.operator_norm() <= 1.0 && sn.operator_norm() <= 1.0);
        }
    }

    #[test]
    fn negativity_scan() {
        let r = validate_negativity(&mat(1, 1.0, 1.0, 1.0, 1.0), 16).unwrap();
        assert!(r.passed);
        assert_eq!(r.checked, 32);
        let r = validate_negativity(&mat(2, 1.0, 1.0, 1.0, -12.0), 3).unwrap();
        assert!(!r.passed);
        assert!(!r.offenders.is_empty());
    }

    #[test]
    fn single_precision_path() {
        let m = Material::<f32>::new(2, 1.0, 2.0, 1.0, 2.0).unwrap();
        let e = eigenvalues_exact(&m, &[1.0, 0.0]).unwrap();
        assert_relative_eq!(e.lambda1 as f64, -3.77994860236586, max_relative = 1e-5);
        assert_relative_eq!(e.lambda2 as f64, -0.979453323840036, max_relative = 1e-5);
    }
}
