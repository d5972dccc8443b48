//! Synthesis on and analysis from a uniform grid `x_j = 2πj/N`.

use num_complex::Complex;
use rustfft::{FftDirection, FftPlanner};

use super::{lattice_points, FieldError, SpectralField};
use crate::Real;

/// Samples of each field component on an `N^n` grid, axis 0 slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSamples<T> {
    pub n: usize,
    pub resolution: usize,
    pub real_flag: bool,
    pub components: Vec<Vec<Complex<T>>>,
}

impl<T: Real> GridSamples<T> {
    /// Mean of `‖f(x)‖²` over the grid.
    pub fn mean_square(&self) -> T {
        let count = T::from_index(self.resolution.pow(self.n as u32) as i64);
        let total: T = self.components.iter().flat_map(|c| c.iter().map(|z| z.norm_sqr())).sum();
        total / count
    }
}

fn required_resolution(cutoff: usize) -> usize {
    2 * cutoff + 2
}

fn wrap(k: i64, resolution: usize) -> usize {
    k.rem_euclid(resolution as i64) as usize
}

fn flat_index(k: &[i64], resolution: usize) -> usize {
    k.iter().fold(0, |acc, ki| acc * resolution + wrap(*ki, resolution))
}

/// In-place n-dimensional FFT by successive passes along each axis.
fn fft_nd<T: Real>(data: &mut [Complex<T>], n: usize, resolution: usize, direction: FftDirection) {
    let mut planner = FftPlanner::<T>::new();
    let fft = planner.plan_fft(resolution, direction);
    let mut line = vec![Complex::new(T::zero(), T::zero()); resolution];
    for axis in 0..n {
        let stride = resolution.pow((n - 1 - axis) as u32);
        let outer = resolution.pow(axis as u32);
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * stride * resolution + inner;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + j * stride];
                }
                fft.process(&mut line);
                for (j, v) in line.iter().enumerate() {
                    data[base + j * stride] = *v;
                }
            }
        }
    }
}

/// Evaluates the field on an `N^n` grid with `N ≥ 2K+2`.
pub fn grid_transform<T: Real>(field: &SpectralField<T>, resolution: usize) -> Result<GridSamples<T>, FieldError> {
    let required = required_resolution(field.cutoff());
    if resolution < required {
        return Err(FieldError::Alias { resolution, required });
    }
    let n = field.n();
    let size = resolution.pow(n as u32);
    let mut components = vec![vec![Complex::new(T::zero(), T::zero()); size]; n];
    for (k, v) in field.coeffs() {
        let idx = flat_index(k, resolution);
        for (comp, c) in components.iter_mut().zip(v) {
            comp[idx] = *c;
        }
    }
    for comp in &mut components {
        // Unnormalized inverse transform: Σ_k û_k e^{+ik·x_j}.
        fft_nd(comp, n, resolution, FftDirection::Inverse);
        if field.real_flag() {
            for z in comp.iter_mut() {
                z.im = T::zero();
            }
        }
    }
    Ok(GridSamples { n, resolution, real_flag: field.real_flag(), components })
}

/// Recovers the coefficients with `‖k‖_∞ ≤ K` from grid samples.
pub fn inverse_transform<T: Real>(grid: &GridSamples<T>, cutoff: usize) -> Result<SpectralField<T>, FieldError> {
    let required = required_resolution(cutoff);
    if grid.resolution < required {
        return Err(FieldError::Alias { resolution: grid.resolution, required });
    }
    let n = grid.n;
    let size = grid.resolution.pow(n as u32);
    let scale = T::one() / T::from_index(size as i64);
    let spectra: Vec<Vec<Complex<T>>> = grid
        .components
        .iter()
        .map(|comp| {
            let mut c = comp.clone();
            fft_nd(&mut c, n, grid.resolution, FftDirection::Forward);
            c.iter().map(|z| z * scale).collect()
        })
        .collect();

    let mut out = SpectralField::zeros(n, cutoff, false);
    for k in lattice_points(n, cutoff) {
        let idx = flat_index(&k, grid.resolution);
        out.insert(k, spectra.iter().map(|s| s[idx]).collect())?;
    }
    if !grid.real_flag {
        return Ok(out);
    }
    // Average each ±k pair so the result is exactly Hermitian.
    let mut real = SpectralField::zeros(n, cutoff, true);
    for (k, v) in out.coeffs() {
        let neg: Vec<i64> = k.iter().map(|x| -x).collect();
        if *k < neg {
            continue;
        }
        let w = out.get(&neg).expect("lattice is symmetric");
        let avg = v.iter().zip(w).map(|(a, b)| (a + b.conj()) * T::lit(0.5)).collect();
        real.insert(k.clone(), avg)?;
    }
    Ok(real)
}
