//! Spectral solver and verification suite for linear state-based
//! peridynamics on the periodic torus `[0, 2π]^n`.
//!
//! The peridynamic operator acts on a Fourier mode `e^{ik·x}γ` as a real
//! symmetric matrix `M(k)` with one eigenvalue `λ1` along `k` and `λ2` on
//! its orthogonal complement. Everything in the crate is built on that
//! structure:
//!
//! - [`specfun`]: hypergeometric series, gamma and digamma.
//! - [`multipliers`]: `M(ν)` in closed form and by quadrature, plus the
//!   Navier reference.
//! - [`asymptotics`]: large-`‖ν‖` expansions of the eigenvalues.
//! - [`fields`]: truncated Fourier fields, Sobolev norms, grid transforms.
//! - [`solvers`]: equilibrium, homogeneous and forced evolution in
//!   coefficient space.
//! - [`studies`]: convergence, asymptotic and regularity experiments.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the common double-precision instantiations.

pub mod asymptotics;
pub mod fields;
pub mod multipliers;
pub mod quadrature;
mod scalar;
pub mod solvers;
pub mod specfun;
pub mod studies;

pub use num_complex::Complex;
pub use scalar::Real;

pub type Material64 = multipliers::Material<f64>;
pub type Material32 = multipliers::Material<f32>;
pub type MultiplierMatrix64 = multipliers::MultiplierMatrix<f64>;
pub type SpectralField64 = fields::SpectralField<f64>;
pub type SpectralField32 = fields::SpectralField<f32>;
pub type OperatorSelector64 = solvers::OperatorSelector<f64>;
pub type TimeSolution64 = solvers::TimeSolution<f64>;
