//! Generalized hypergeometric series `pFq(a; b; z)` with `p ≤ q`.

use serde::{Deserialize, Serialize};

use super::SpecfunError;
use crate::Real;

/// Hard cap on the number of series terms.
pub const PFQ_TERM_CAP: usize = 20_000;

/// Relative size below which a term counts as negligible.
pub const PFQ_TOLERANCE: f64 = 1e-16;

const NEGLIGIBLE_RUN: usize = 3;
const CANCELLATION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesDiagnostic {
    /// The largest term or partial sum dwarfs the result.
    LossOfPrecision,
}

/// Value of a summed series together with its convergence record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult<T> {
    pub value: T,
    pub terms_used: usize,
    pub converged: bool,
    /// Largest magnitude among the terms and the running partial sums.
    pub max_term_magnitude: T,
    pub diagnostic: Option<SeriesDiagnostic>,
}

impl<T: Real> SeriesResult<T> {
    /// Ratio of the largest intermediate magnitude to the result.
    pub fn cancellation_ratio(&self) -> T {
        if self.value == T::zero() {
            if self.max_term_magnitude == T::zero() {
                T::one()
            } else {
                T::infinity()
            }
        } else {
            self.max_term_magnitude / self.value.abs()
        }
    }
}

fn is_nonpositive_integer<T: Real>(x: T) -> bool {
    x <= T::zero() && x == x.floor()
}

/// Sums `Σ_m Π(a_i)_m / Π(b_j)_m · z^m / m!`.
///
/// Terms are generated by their ratio recurrence and accumulated with
/// Neumaier compensation. Summation stops once three consecutive terms
/// fall below `1e-16` of the partial sum, or when a term is exactly zero.
/// A result whose intermediate magnitudes exceed `1e12·|value|` is
/// returned with `converged = false` and a loss-of-precision diagnostic.
///
/// ```
/// use perispec::specfun::pfq;
/// // 1F2(a; a, 3/2; -π²/4) = sin(π)/π
/// let pi = std::f64::consts::PI;
/// let r = pfq(&[1.5], &[1.5, 1.5], -pi * pi / 4.0).unwrap();
/// assert!(r.value.abs() < 1e-12);
/// ```
pub fn pfq<T: Real>(numer: &[T], denom: &[T], z: T) -> Result<SeriesResult<T>, SpecfunError> {
    if numer.len() > denom.len() {
        return Err(SpecfunError::InvalidParameter(format!(
            "p = {} exceeds q = {}",
            numer.len(),
            denom.len()
        )));
    }
    if let Some(b) = denom.iter().find(|b| is_nonpositive_integer(**b)) {
        return Err(SpecfunError::InvalidParameter(format!(
            "denominator parameter {b} is zero or a negative integer"
        )));
    }
    if !z.is_finite() || numer.iter().chain(denom).any(|v| !v.is_finite()) {
        return Err(SpecfunError::InvalidParameter("non-finite input".into()));
    }

    let tol = T::lit(PFQ_TOLERANCE);
    let mut sum = T::one();
    let mut compensation = T::zero();
    let mut term = T::one();
    let mut max_mag = T::one();
    let mut negligible = 0usize;
    let mut terms_used = 1usize;
    let mut finished = z == T::zero();

    while !finished {
        if terms_used >= PFQ_TERM_CAP {
            return Err(SpecfunError::NonConvergence { terms: terms_used });
        }
        let m = T::from_index(terms_used as i64 - 1);
        let mut ratio = z / (m + T::one());
        for &a in numer {
            ratio *= a + m;
        }
        for &b in denom {
            ratio = ratio / (b + m);
        }
        term *= ratio;
        terms_used += 1;
        if !term.is_finite() {
            return Err(SpecfunError::NonConvergence { terms: terms_used });
        }
        if term == T::zero() {
            finished = true;
            continue;
        }

        // Neumaier's variant of Kahan summation.
        let next = sum + term;
        if sum.abs() >= term.abs() {
            compensation += (sum - next) + term;
        } else {
            compensation += (term - next) + sum;
        }
        sum = next;

        let partial = sum + compensation;
        max_mag = max_mag.max(term.abs()).max(partial.abs());
        if term.abs() < tol * partial.abs() {
            negligible += 1;
            if negligible >= NEGLIGIBLE_RUN {
                finished = true;
            }
        } else {
            negligible = 0;
        }
    }

    let value = sum + compensation;
    let mut result = SeriesResult {
        value,
        terms_used,
        converged: true,
        max_term_magnitude: max_mag,
        diagnostic: None,
    };
    if result.cancellation_ratio() > T::lit(CANCELLATION_LIMIT) {
        result.converged = false;
        result.diagnostic = Some(SeriesDiagnostic::LossOfPrecision);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive, Zero};
    use proptest::prelude::*;

    fn rational(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    /// Partial sum of `count` series terms in exact rational arithmetic.
    fn exact_partial_sum(
        numer: &[BigRational],
        denom: &[BigRational],
        z: &BigRational,
        count: usize,
    ) -> BigRational {
        let mut term = BigRational::one();
        let mut sum = BigRational::zero();
        for m in 0..count {
            sum += &term;
            let mm = BigRational::from_integer(BigInt::from(m));
            let mut ratio = z / (&mm + BigRational::one());
            for a in numer {
                ratio *= a + &mm;
            }
            for b in denom {
                ratio /= b + &mm;
            }
            term *= ratio;
        }
        sum
    }

    #[test]
    fn zero_argument_is_one() {
        let r = pfq(&[1.0, 1.5], &[2.0, 2.5, 2.5], 0.0_f64).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.terms_used, 1);
        assert!(r.converged);
    }

    #[test]
    fn sine_cardinal_zero() {
        let pi = std::f64::consts::PI;
        let r = pfq(&[1.5], &[1.5, 1.5], -pi * pi / 4.0).unwrap();
        assert!(r.value.abs() < 1e-12, "{}", r.value);
        assert!(r.max_term_magnitude >= r.value.abs());
    }

    #[test]
    fn matches_exact_rational_partial_sum() {
        let r = pfq(&[0.5], &[2.5, 1.5], -1.0_f64).unwrap();
        let exact = exact_partial_sum(
            &[rational(1, 2)],
            &[rational(5, 2), rational(3, 2)],
            &rational(-1, 1),
            50,
        );
        let reference = exact.to_f64().unwrap();
        assert_relative_eq!(r.value, reference, max_relative = 1e-15);
        assert!(r.converged);
    }

    #[test]
    fn exponential_and_cosine() {
        // 0F0(;;x) = e^x, 0F1(;1/2;-x²/4) = cos x
        let r = pfq::<f64>(&[], &[], 1.0).unwrap();
        assert_relative_eq!(r.value, std::f64::consts::E, max_relative = 1e-15);
        let x = 3.0_f64;
        let r = pfq(&[], &[0.5], -x * x / 4.0).unwrap();
        assert_relative_eq!(r.value, x.cos(), max_relative = 1e-13);
    }

    #[test]
    fn terminating_series() {
        // 1F1(-2; 1; z) = 1 - 2z + z²/2
        let r = pfq(&[-2.0], &[1.0], 3.0_f64).unwrap();
        assert_relative_eq!(r.value, 1.0 - 6.0 + 4.5, max_relative = 1e-15);
        assert_eq!(r.terms_used, 4);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            pfq(&[1.0, 2.0], &[3.0], 0.5_f64),
            Err(SpecfunError::InvalidParameter(_))
        ));
        assert!(matches!(
            pfq(&[1.0], &[-2.0], 0.5_f64),
            Err(SpecfunError::InvalidParameter(_))
        ));
        assert!(matches!(
            pfq(&[1.0], &[0.0], 0.5_f64),
            Err(SpecfunError::InvalidParameter(_))
        ));
        assert!(matches!(
            pfq(&[1.0], &[1.0], f64::NAN),
            Err(SpecfunError::InvalidParameter(_))
        ));
    }

    #[test]
    fn overflow_is_nonconvergence() {
        let r = pfq(&[1.0], &[1.0], -5.0e3_f64);
        assert!(matches!(r, Err(SpecfunError::NonConvergence { .. })));
    }

    #[test]
    fn cancellation_flagged() {
        // e^{-40} from its Taylor series loses everything.
        let r = pfq::<f64>(&[], &[], -40.0).unwrap();
        assert!(!r.converged);
        assert_eq!(r.diagnostic, Some(SeriesDiagnostic::LossOfPrecision));
    }

    #[test]
    fn single_precision() {
        let r = pfq(&[0.5_f32], &[2.5, 1.5], -1.0).unwrap();
        let d = pfq(&[0.5_f64], &[2.5, 1.5], -1.0).unwrap();
        assert_relative_eq!(r.value as f64, d.value, max_relative = 1e-6);
    }

    proptest! {
        #[test]
        fn permutation_invariance(
            a1 in 0.1f64..4.0, a2 in 0.1f64..4.0,
            b1 in 0.1f64..4.0, b2 in 0.1f64..4.0, b3 in 0.1f64..4.0,
            z in -6.0f64..6.0,
        ) {
            let base = pfq(&[a1, a2], &[b1, b2, b3], z).unwrap();
            let perm = pfq(&[a2, a1], &[b3, b1, b2], z).unwrap().value;
            prop_assert!((base.value - perm).abs() <= 64.0 * f64::EPSILON * base.max_term_magnitude);
        }

        #[test]
        fn parameter_cancellation(a in 0.1f64..5.0, c in 0.1f64..5.0, z in -8.0f64..8.0) {
            let full = pfq(&[a], &[a, c], z).unwrap().value;
            let reduced = pfq(&[], &[c], z).unwrap().value;
            prop_assert!((full - reduced).abs() <= 1e-12 * reduced.abs().max(1.0));
        }

        #[test]
        fn alternating_bound(a in 0.1f64..4.0, b in 0.1f64..4.0, c in 0.1f64..4.0, x in 0.0f64..30.0) {
            let r = pfq(&[a], &[b, c], -x).unwrap();
            prop_assert!(r.value.abs() <= r.max_term_magnitude);
        }
    }
}
