//! Quadrature evaluation of the multiplier integrals over the ball `B_δ`.
//!
//! In coordinates aligned with `ν` (`w = rω`, `ν̂·ω = cos θ`) every
//! integrand is `r^{n+1−β}` times a bounded analytic function of
//! `x = ρ r cos θ`. The radial factor is removed by `r = δ u^p`, leaving a
//! polynomial weight in `u`; the polar angle is integrated with a fixed
//! composite rule fine enough for the oscillation at that radius.

use super::{euclidean_norm, scaling_constant, Material, MultiplierError, MultiplierMatrix};
use crate::quadrature::{composite, integrate, QuadratureOptions};
use crate::specfun::gamma_fn;
use crate::Real;

/// Largest spatial dimension the oracle accepts.
pub const ORACLE_MAX_DIM: usize = 3;
/// Largest `‖ν‖δ` the oracle accepts.
pub const ORACLE_MAX_ARGUMENT: f64 = 500.0;

/// `sin x / x`.
fn sinc<T: Real>(x: T) -> T {
    if x.abs() < T::lit(1e-4) {
        T::one() - x * x / T::lit(6.0)
    } else {
        x.sin() / x
    }
}

/// `6 (x − sin x) / x³`, positive and equal to 1 at the origin.
fn cubic_remainder<T: Real>(x: T) -> T {
    if x.abs() < T::lit(1.5) {
        // 6 Σ (−1)^k x^{2k} / (2k+3)!
        let x2 = x * x;
        let mut term = T::one();
        let mut sum = T::one();
        let mut k = 1i64;
        while term.abs() > T::epsilon() * T::lit(0.01) {
            let d = T::from_index((2 * k + 2) * (2 * k + 3));
            term = -term * x2 / d;
            sum += term;
            k += 1;
        }
        sum
    } else {
        T::lit(6.0) * (x - x.sin()) / (x * x * x)
    }
}

/// Radial moments shared by all oracle outputs.
#[derive(Debug, Clone, Copy)]
struct Moments<T> {
    /// Bond part of `λ1`.
    parallel: T,
    /// Bond part on `ν⊥`.
    transverse: T,
    /// `∫ (ν̂·w) ‖w‖^{−β} sin(ν·w) dw`.
    sine: T,
    /// `λ2` from its own integral representation.
    lambda2: T,
}

fn check_envelope<T: Real>(m: &Material<T>, rho: T) -> Result<(), MultiplierError> {
    if m.n() > ORACLE_MAX_DIM {
        return Err(MultiplierError::OutsideEnvelope(format!(
            "dimension {} exceeds {ORACLE_MAX_DIM}",
            m.n()
        )));
    }
    let arg = (rho * m.delta()).to_f64_lossy();
    if arg > ORACLE_MAX_ARGUMENT {
        return Err(MultiplierError::OutsideEnvelope(format!(
            "|nu|*delta = {arg} exceeds {ORACLE_MAX_ARGUMENT}"
        )));
    }
    Ok(())
}

fn moments<T: Real>(m: &Material<T>, rho: T) -> Result<Moments<T>, MultiplierError> {
    check_envelope(m, rho)?;
    let n = m.n();
    let nf = m.dim_f();
    let one = T::one();
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let delta = m.delta();

    // ∫_0^δ r^e g(r) dr = δ^{e+1} p ∫_0^1 u^{j−1} g(δ u^p) du, p = j/(e+1).
    let e = nf + one - m.beta();
    let j = (e + one).ceil().max(one);
    let p = j / (e + one);
    let jacobian = delta.powf(e + one) * p;
    let j_int = j.to_i64().unwrap_or(1);

    let sphere = if n >= 2 {
        let h = (nf - one) / two;
        two * T::PI().powf(h) / gamma_fn(h).expect("positive argument")
    } else {
        two
    };
    let transverse_weight = if n >= 2 { one / (nf - one) } else { T::zero() };

    // Integrand values at (r, cos θ, sin θ), without the r^e factor.
    let kernel = |r: T, c: T, s: T| -> [T; 4] {
        let x = rho * r * c;
        let c2 = c * c;
        let h1 = sinc(half * x);
        let h1 = h1 * h1;
        [
            c2 * c2 * h1,
            transverse_weight * s * s * c2 * h1,
            c2 * sinc(x),
            c2 * c2 * cubic_remainder(x),
        ]
    };

    let angular = |r: T| -> [T; 4] {
        if n == 1 {
            let v = kernel(r, one, T::zero());
            return v.map(|x| x * sphere);
        }
        let panels = 2 + (rho * r * half).ceil().to_usize().unwrap_or(0);
        let v = composite(
            |theta: T| {
                let (s, c) = theta.sin_cos();
                let w = s.powi(n as i32 - 2);
                kernel(r, c, s).map(|x| x * w)
            },
            T::zero(),
            T::PI(),
            panels,
        );
        v.map(|x| x * sphere)
    };

    let opts = QuadratureOptions {
        initial_panels: 4 + (rho * delta / T::lit(4.0)).ceil().to_usize().unwrap_or(0),
        ..QuadratureOptions::default()
    };
    let q = integrate(
        |u: T| {
            let r = delta * u.powf(p);
            let w = u.powi(j_int as i32 - 1);
            angular(r).map(|x| x * w)
        },
        T::zero(),
        one,
        &opts,
    )?;
    let [a, b, s, l2] = q.value.map(|x| x * jacobian);

    let c = scaling_constant(m);
    let bond = (nf + two) * m.mu() * c * rho * rho;
    Ok(Moments {
        parallel: -half * bond * a,
        transverse: -half * bond * b,
        sine: rho * s,
        lambda2: -bond * l2 / T::lit(6.0),
    })
}

fn state_term<T: Real>(m: &Material<T>, sine: T) -> T {
    let half_c = T::lit(0.5) * scaling_constant(m);
    -(m.lambda_star() - m.mu()) * (half_c * sine).powi(2)
}

pub(crate) fn eigenvalues_at_radius<T: Real>(m: &Material<T>, rho: T) -> Result<(T, T), MultiplierError> {
    if rho == T::zero() {
        return Ok((T::zero(), T::zero()));
    }
    let mo = moments(m, rho)?;
    Ok((mo.parallel + state_term(m, mo.sine), mo.lambda2))
}

/// Bond and state parts `(λ_{1,1}, λ_{1,2})` of `λ1` at radius `rho`.
pub fn lambda1_parts_quadrature<T: Real>(m: &Material<T>, rho: T) -> Result<(T, T), MultiplierError> {
    if rho == T::zero() {
        return Ok((T::zero(), T::zero()));
    }
    let mo = moments(m, rho)?;
    Ok((mo.parallel, state_term(m, mo.sine)))
}

/// `λ1`, `λ2` from their integral representations.
///
/// Valid for `n ≤ 3` and `‖ν‖δ ≤ 500`.
pub fn eigenvalues_quadrature<T: Real>(m: &Material<T>, nu: &[T]) -> Result<(T, T), MultiplierError> {
    m.check_dim(nu)?;
    eigenvalues_at_radius(m, euclidean_norm(nu))
}

/// `M = M_b + M_s` assembled from the bond moments and the sine integral.
///
/// The transverse eigenvalue comes from the bond moment on `ν⊥`, not from
/// the `λ2` integral, so the two routes check each other.
pub fn multiplier_quadrature<T: Real>(m: &Material<T>, nu: &[T]) -> Result<MultiplierMatrix<T>, MultiplierError> {
    m.check_dim(nu)?;
    let rho = euclidean_norm(nu);
    if rho == T::zero() {
        return Ok(MultiplierMatrix::zero(m.n()));
    }
    let mo = moments(m, rho)?;
    let lambda2 = if m.n() == 1 { mo.lambda2 } else { mo.transverse };
    Ok(MultiplierMatrix::from_eigen(nu, mo.parallel + state_term(m, mo.sine), lambda2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multipliers::{eigenvalues_exact, multiplier_matrix};
    use approx::assert_relative_eq;

    fn mat(n: usize, delta: f64, beta: f64, mu: f64, ls: f64) -> Material<f64> {
        Material::new(n, delta, beta, mu, ls).unwrap()
    }

    #[test]
    fn helper_functions() {
        for x in [1e-6, 0.01, 0.5, 1.2, 1.49, 1.51, 3.0, 40.0] {
            let direct = 6.0 * (x - f64::sin(x)) / (x * x * x);
            if x > 0.3 {
                assert_relative_eq!(cubic_remainder(x), direct, max_relative = 1e-12);
            }
            assert_relative_eq!(sinc(x), if x < 1e-4 { 1.0 - x * x / 6.0 } else { x.sin() / x });
        }
        assert_eq!(cubic_remainder(0.0_f64), 1.0);
    }

    #[test]
    fn zero_frequency() {
        let m = mat(2, 1.0, 1.0, 1.0, 2.0);
        assert_eq!(eigenvalues_quadrature(&m, &[0.0, 0.0]).unwrap(), (0.0, 0.0));
        assert_eq!(multiplier_quadrature(&m, &[0.0, 0.0]).unwrap(), MultiplierMatrix::zero(2));
    }

    #[test]
    fn matches_closed_form_one_dimension() {
        let m = mat(1, 1.0, 0.0, 1.0, 1.0);
        let (l1, l2) = eigenvalues_quadrature(&m, &[2.0]).unwrap();
        let e = eigenvalues_exact(&m, &[2.0]).unwrap();
        assert_relative_eq!(l1, e.lambda1, max_relative = 1e-8);
        assert_relative_eq!(l2, e.lambda2, max_relative = 1e-8);
    }

    #[test]
    fn matches_closed_form_three_dimensions() {
        let m = mat(3, 0.5, 3.5, 1.0, 2.0);
        let (l1, l2) = eigenvalues_quadrature(&m, &[1.0, 1.0, 0.0]).unwrap();
        let e = eigenvalues_exact(&m, &[1.0, 1.0, 0.0]).unwrap();
        assert_relative_eq!(l1, e.lambda1, max_relative = 1e-7);
        assert_relative_eq!(l2, e.lambda2, max_relative = 1e-7);
    }

    #[test]
    fn matrix_matches_closed_form() {
        let m = mat(2, 1.0, 1.0, 1.0, 3.0);
        let q = multiplier_quadrature(&m, &[2.0, 1.0]).unwrap().dense();
        let h = multiplier_matrix(&m, &[2.0, 1.0]).unwrap().dense();
        for (a, b) in q.iter().zip(&h) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        let axis = multiplier_quadrature(&m, &[0.0, 3.0]).unwrap().dense();
        assert!(axis[1].abs() < 1e-10 && axis[2].abs() < 1e-10);
    }

    #[test]
    fn one_dimensional_sine_integral_closed_form() {
        // n = 1, β = 0: λ2 = 6c (Si(ρδ)/ρ − δ) with c = 3 at δ = 1.
        let m = mat(1, 1.0, 0.0, 1.0, 1.0);
        let rho = 7.0_f64;
        let si = crate::quadrature::integrate(
            |t: f64| [sinc(t)],
            0.0,
            rho,
            &QuadratureOptions::default(),
        )
        .unwrap()
        .value[0];
        let (_, l2) = eigenvalues_quadrature(&m, &[rho]).unwrap();
        assert_relative_eq!(l2, 18.0 * (si / rho - 1.0), max_relative = 1e-11);
    }

    #[test]
    fn envelope_enforced() {
        let m = mat(4, 1.0, 1.0, 1.0, 1.0);
        assert!(matches!(
            eigenvalues_quadrature(&m, &[1.0, 0.0, 0.0, 0.0]),
            Err(MultiplierError::OutsideEnvelope(_))
        ));
        let m = mat(1, 1.0, 1.0, 1.0, 1.0);
        assert!(eigenvalues_quadrature(&m, &[501.0]).is_err());
    }
}
