//! Truncated Fourier representation of periodic vector fields on `[0, 2π]^n`.
//!
//! Coefficients follow `ĝ_k = (2π)^{−n} ∫ g(x) e^{−ik·x} dx`, so a field is
//! synthesized as `g(x) = Σ_k ĝ_k e^{ik·x}`.

mod grid;
mod io;

use std::collections::BTreeMap;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::Real;

pub use grid::{grid_transform, inverse_transform, GridSamples};
pub use io::{load_field, save_field, FieldDocument, FieldEntry};

/// Margin added to the decay exponent of [`make_decay_field`].
pub const DECAY_MARGIN: f64 = 0.51;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("frequency {k:?} exceeds the cutoff {cutoff}")]
    CutoffViolation { k: Vec<i64>, cutoff: usize },
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("real field violates Hermitian symmetry at {k:?}")]
    HermitianViolation { k: Vec<i64> },
    #[error("grid resolution {resolution} is below the alias-free minimum {required}")]
    Alias { resolution: usize, required: usize },
    #[error("decay fit needs at least 4 nonempty shells, found {shells}")]
    InsufficientData { shells: usize },
    #[error("field document: {0}")]
    Format(String),
}

/// Lattice frequency.
pub type Freq = Vec<i64>;

/// A band-limited vector field given by its Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField<T> {
    n: usize,
    cutoff: usize,
    real_flag: bool,
    coeffs: BTreeMap<Freq, Vec<Complex<T>>>,
}

/// All `k ∈ Z^n` with `‖k‖_∞ ≤ K`, in lexicographic order.
pub fn lattice_points(n: usize, cutoff: usize) -> Vec<Freq> {
    let k = cutoff as i64;
    let mut out: Vec<Freq> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * (2 * cutoff + 1));
        for prefix in &out {
            for v in -k..=k {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// `‖k‖²`.
pub fn norm_sq(k: &[i64]) -> i64 {
    k.iter().map(|x| x * x).sum()
}

fn negate(k: &[i64]) -> Freq {
    k.iter().map(|x| -x).collect()
}

/// True for the representative of each `±k` pair (first nonzero entry positive).
fn is_positive_half(k: &[i64]) -> bool {
    k.iter().find(|x| **x != 0).is_some_and(|x| *x > 0)
}

impl<T: Real> SpectralField<T> {
    pub fn zeros(n: usize, cutoff: usize, real_flag: bool) -> Self {
        Self { n, cutoff, real_flag, coeffs: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }
    pub fn real_flag(&self) -> bool {
        self.real_flag
    }
    pub fn coeffs(&self) -> &BTreeMap<Freq, Vec<Complex<T>>> {
        &self.coeffs
    }
    pub fn get(&self, k: &[i64]) -> Option<&Vec<Complex<T>>> {
        self.coeffs.get(k)
    }
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Sets one coefficient; for a real field the partner `−k` is set to
    /// the conjugate.
    pub fn insert(&mut self, k: Freq, value: Vec<Complex<T>>) -> Result<(), FieldError> {
        self.check_freq(&k)?;
        if value.len() != self.n {
            return Err(FieldError::DimensionMismatch { expected: self.n, got: value.len() });
        }
        if self.real_flag {
            let neg = negate(&k);
            if neg == k {
                let v = value.iter().map(|c| Complex::new(c.re, T::zero())).collect();
                self.coeffs.insert(k, v);
                return Ok(());
            }
            self.coeffs.insert(neg, value.iter().map(|c| c.conj()).collect());
        }
        self.coeffs.insert(k, value);
        Ok(())
    }

    /// Real single-mode field `v e^{ik·x}` plus its conjugate partner when
    /// `real_flag`.
    pub fn single_mode(n: usize, cutoff: usize, k: Freq, value: Vec<Complex<T>>, real_flag: bool) -> Result<Self, FieldError> {
        let mut f = Self::zeros(n, cutoff, real_flag);
        f.insert(k, value)?;
        Ok(f)
    }

    /// Builds a field from raw entries, validating every invariant.
    pub fn from_entries(
        n: usize,
        cutoff: usize,
        real_flag: bool,
        entries: impl IntoIterator<Item = (Freq, Vec<Complex<T>>)>,
    ) -> Result<Self, FieldError> {
        let mut f = Self::zeros(n, cutoff, real_flag);
        for (k, v) in entries {
            f.check_freq(&k)?;
            if v.len() != n {
                return Err(FieldError::DimensionMismatch { expected: n, got: v.len() });
            }
            f.coeffs.insert(k, v);
        }
        if real_flag {
            f.check_hermitian()?;
        }
        Ok(f)
    }

    fn check_freq(&self, k: &[i64]) -> Result<(), FieldError> {
        if k.len() != self.n {
            return Err(FieldError::DimensionMismatch { expected: self.n, got: k.len() });
        }
        if k.iter().any(|x| x.unsigned_abs() as usize > self.cutoff) {
            return Err(FieldError::CutoffViolation { k: k.to_vec(), cutoff: self.cutoff });
        }
        Ok(())
    }

    fn check_hermitian(&self) -> Result<(), FieldError> {
        let tol = T::lit(1e-12);
        for (k, v) in &self.coeffs {
            let scale = v.iter().fold(T::one(), |acc, c| acc.max(c.norm()));
            let ok = match self.coeffs.get(&negate(k)) {
                Some(w) => v.iter().zip(w).all(|(a, b)| (a.conj() - b).norm() <= tol * scale),
                None => v.iter().all(|c| c.norm() <= tol),
            };
            if !ok {
                return Err(FieldError::HermitianViolation { k: k.clone() });
            }
        }
        Ok(())
    }

    /// Applies `f` to every stored coefficient.
    pub fn map_modes<F>(&self, f: F) -> Self
    where
        F: Fn(&[i64], &[Complex<T>]) -> Vec<Complex<T>>,
    {
        self.with_coeffs(self.coeffs.iter().map(|(k, v)| (k.clone(), f(k, v))).collect())
    }

    /// Fallible variant of [`SpectralField::map_modes`].
    pub fn try_map_modes<F, E>(&self, f: F) -> Result<Self, E>
    where
        F: Fn(&[i64], &[Complex<T>]) -> Result<Vec<Complex<T>>, E>,
    {
        let mut coeffs = BTreeMap::new();
        for (k, v) in &self.coeffs {
            coeffs.insert(k.clone(), f(k, v)?);
        }
        Ok(self.with_coeffs(coeffs))
    }

    pub(crate) fn insert_raw(&mut self, k: Freq, value: Vec<Complex<T>>) {
        self.coeffs.insert(k, value);
    }

    fn with_coeffs(&self, coeffs: BTreeMap<Freq, Vec<Complex<T>>>) -> Self {
        Self { n: self.n, cutoff: self.cutoff, real_flag: self.real_flag, coeffs }
    }

    /// `self − other`, over the union of stored frequencies.
    pub fn sub(&self, other: &Self) -> Result<Self, FieldError> {
        if self.n != other.n {
            return Err(FieldError::DimensionMismatch { expected: self.n, got: other.n });
        }
        let mut out = Self::zeros(self.n, self.cutoff.max(other.cutoff), self.real_flag && other.real_flag);
        let zero = vec![Complex::new(T::zero(), T::zero()); self.n];
        let keys: std::collections::BTreeSet<&Freq> = self.coeffs.keys().chain(other.coeffs.keys()).collect();
        for k in keys {
            let a = self.coeffs.get(k).unwrap_or(&zero);
            let b = other.coeffs.get(k).unwrap_or(&zero);
            out.coeffs.insert(k.clone(), a.iter().zip(b).map(|(x, y)| x - y).collect());
        }
        Ok(out)
    }

    /// `‖g‖_{H^q} = (Σ (1+‖k‖²)^q ‖ĝ_k‖²)^{1/2}`.
    pub fn sobolev_norm(&self, q: T) -> T {
        let total: T = self
            .coeffs
            .iter()
            .map(|(k, v)| {
                let w = (T::one() + T::from_index(norm_sq(k))).powf(q);
                w * v.iter().map(|c| c.norm_sqr()).sum::<T>()
            })
            .sum();
        total.sqrt()
    }

    /// `Σ_k û_k e^{ik·x}`.
    pub fn synthesize(&self, x: &[T]) -> Vec<Complex<T>> {
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.n];
        for (k, v) in &self.coeffs {
            let phase: T = k.iter().zip(x).map(|(ki, xi)| T::from_index(*ki) * *xi).sum();
            let e = Complex::new(phase.cos(), phase.sin());
            for (o, c) in out.iter_mut().zip(v) {
                *o = *o + c * e;
            }
        }
        if self.real_flag {
            for o in &mut out {
                o.im = T::zero();
            }
        }
        out
    }

    /// Largest coefficient-vector norm, used for relative comparisons.
    pub fn max_coefficient_norm(&self) -> T {
        self.coeffs.values().map(|v| vec_norm(v)).fold(T::zero(), T::max)
    }
}

pub(crate) fn vec_norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt()
}

/// Real field with `‖û_k‖ = ‖k‖^{−s−n/2−ε₀}`, `ε₀ = 0.51`, and seeded random
/// directions and phases; `û_0 = 0`.
///
/// The field lies in `H^s` but not in `H^{s+0.6}`.
pub fn make_decay_field<T: Real>(n: usize, cutoff: usize, s: T, seed: u64) -> SpectralField<T> {
    let exponent = s + T::from_index(n as i64) / T::lit(2.0) + T::lit(DECAY_MARGIN);
    power_law_field(n, cutoff, exponent, seed)
}

/// Real field with `‖û_k‖ = ‖k‖^{−exponent}` for `k ≠ 0`.
pub fn power_law_field<T: Real>(n: usize, cutoff: usize, exponent: T, seed: u64) -> SpectralField<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut field = SpectralField::zeros(n, cutoff, true);
    for k in lattice_points(n, cutoff) {
        if !is_positive_half(&k) {
            continue;
        }
        let magnitude = T::from_index(norm_sq(&k)).sqrt().powf(-exponent);
        let v = random_unit_vector::<T>(&mut rng, n);
        let phase = T::lit(rng.random::<f64>() * std::f64::consts::TAU);
        let rot = Complex::new(phase.cos(), phase.sin());
        let value = v.iter().map(|d| rot * (*d * magnitude)).collect();
        field.insert(k, value).expect("lattice point within cutoff");
    }
    field
}

fn random_unit_vector<T: Real>(rng: &mut ChaCha8Rng, n: usize) -> Vec<T> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.iter().map(|x| T::lit(x / norm)).collect();
        }
    }
}

/// Slope `σ` of `log ‖û_k‖` against `log ‖k‖` over shells `K/4 ≤ ‖k‖ ≤ K`.
///
/// Each shell of equal `‖k‖` contributes the mean of its log magnitudes, so
/// an exact power law is recovered exactly.
pub fn decay_exponent_fit<T: Real>(field: &SpectralField<T>) -> Result<T, FieldError> {
    let kmax = field.cutoff as i64;
    let k2 = kmax * kmax;
    let mut shells: BTreeMap<i64, (T, usize)> = BTreeMap::new();
    for (k, v) in &field.coeffs {
        let q = norm_sq(k);
        if q == 0 || 16 * q < k2 || q > k2 {
            continue;
        }
        let mag = vec_norm(v);
        if mag > T::zero() {
            let e = shells.entry(q).or_insert((T::zero(), 0));
            e.0 += mag.ln();
            e.1 += 1;
        }
    }
    if shells.len() < 4 {
        return Err(FieldError::InsufficientData { shells: shells.len() });
    }
    let pts: Vec<(T, T)> = shells
        .iter()
        .map(|(q, (sum, count))| {
            let x = T::from_index(*q).ln() / T::lit(2.0);
            (x, *sum / T::from_index(*count as i64))
        })
        .collect();
    Ok(least_squares_slope(&pts))
}

pub(crate) fn least_squares_slope<T: Real>(pts: &[(T, T)]) -> T {
    let m = T::from_index(pts.len() as i64);
    let mx = pts.iter().map(|p| p.0).sum::<T>() / m;
    let my = pts.iter().map(|p| p.1).sum::<T>() / m;
    let sxy: T = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: T = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
