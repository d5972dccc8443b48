//! Special functions needed by the multiplier formulas.
//!
//! | Function | Description |
//! |----------|-------------|
//! | [`pfq`] | generalized hypergeometric series with `p ≤ q` |
//! | [`gamma_fn`] | Γ(x) |
//! | [`recip_gamma`] | 1/Γ(x), zero at the poles |
//! | [`digamma`] | ψ(x) |
//! | [`euler_gamma`] | Euler's constant γ |

mod gamma;
mod pfq;

pub use gamma::{digamma, euler_gamma, gamma_fn, recip_gamma};
pub use pfq::{pfq, SeriesDiagnostic, SeriesResult, PFQ_TERM_CAP, PFQ_TOLERANCE};

use thiserror::Error;

/// Failure modes of the special-function layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecfunError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },
    #[error("pole at x = {x}")]
    Pole { x: f64 },
    #[error("argument x = {x} outside the domain")]
    Domain { x: f64 },
}
