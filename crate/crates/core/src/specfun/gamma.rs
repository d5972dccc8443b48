//! Gamma, reciprocal gamma and digamma.

use super::SpecfunError;
use crate::Real;

const LANCZOS_G: f64 = 7.0;

/// Lanczos coefficients for g = 7, n = 9 (Godfrey).
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// ψ asymptotic coefficients B_{2k}/(2k), k = 1..7.
const DIGAMMA_ASYMPTOTIC: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
];

const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

/// Euler's constant γ.
pub fn euler_gamma<T: Real>() -> T {
    T::lit(EULER_MASCHERONI)
}

fn is_nonpositive_integer<T: Real>(x: T) -> bool {
    x <= T::zero() && x == x.floor()
}

fn lanczos_sum<T: Real>(z: T) -> T {
    let mut sum = T::lit(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS[1..].iter().enumerate() {
        sum += T::lit(c) / (z + T::from_index(i as i64 + 1));
    }
    sum
}

/// Γ(x) for real `x` that is not a nonpositive integer.
///
/// Lanczos approximation for `x ≥ 1/2`, reflection below.
pub fn gamma_fn<T: Real>(x: T) -> Result<T, SpecfunError> {
    if !x.is_finite() {
        return Err(SpecfunError::Domain { x: x.to_f64_lossy() });
    }
    if is_nonpositive_integer(x) {
        return Err(SpecfunError::Pole { x: x.to_f64_lossy() });
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        // Γ(x)Γ(1−x) = π / sin(πx)
        let pi = T::PI();
        return pi / ((pi * x).sin() * gamma_unchecked(T::one() - x));
    }
    if x == x.floor() && x <= T::lit(20.0) {
        let mut acc = T::one();
        let mut k = T::lit(2.0);
        while k < x {
            acc *= k;
            k += T::one();
        }
        return acc;
    }
    let z = x - T::one();
    let t = z + T::lit(LANCZOS_G) + half;
    // t^(z+1/2) is split in two halves so that large arguments do not overflow early.
    let power = t.powf((z + half) * half);
    let sqrt_two_pi = (T::lit(2.0) * T::PI()).sqrt();
    sqrt_two_pi * power * (power * (-t).exp()) * lanczos_sum(z)
}

/// 1/Γ(x), continuous through the poles where it vanishes.
pub fn recip_gamma<T: Real>(x: T) -> T {
    if is_nonpositive_integer(x) {
        T::zero()
    } else {
        T::one() / gamma_unchecked(x)
    }
}

/// Digamma ψ(x) = Γ'(x)/Γ(x) for `x > 0`.
pub fn digamma<T: Real>(x: T) -> Result<T, SpecfunError> {
    if !x.is_finite() {
        return Err(SpecfunError::Domain { x: x.to_f64_lossy() });
    }
    if is_nonpositive_integer(x) {
        return Err(SpecfunError::Pole { x: x.to_f64_lossy() });
    }
    if x <= T::zero() {
        return Err(SpecfunError::Domain { x: x.to_f64_lossy() });
    }
    let one = T::one();
    let mut shift = T::zero();
    let mut xx = x;
    let threshold = T::lit(10.0);
    while xx < threshold {
        shift -= one / xx;
        xx += one;
    }
    let inv2 = one / (xx * xx);
    let mut series = T::zero();
    let mut power = inv2;
    for &c in &DIGAMMA_ASYMPTOTIC {
        series += T::lit(c) * power;
        power *= inv2;
    }
    Ok(shift + xx.ln() - T::lit(0.5) / xx - series)
}
