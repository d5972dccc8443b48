//! Large-`‖ν‖` expansions of the multiplier eigenvalues.
//!
//! `λ1 = λ_{1,1} + λ_{1,2}` where `λ_{1,1}` is the bond part and
//! `λ_{1,2} = −(λ*−μ)‖ν‖² ₁F₂(…)²` the state part. The combined expansion
//! is offered twice: as printed for `λ1` directly (`as_stated`) and as the
//! sum of the component expansions (`as_sum`). Their constant terms differ
//! by a factor of two when `β ≠ n`.

use serde::{Deserialize, Serialize};

use crate::multipliers::Material;
use crate::specfun::{digamma, euler_gamma, gamma_fn, recip_gamma};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    BetaNeN,
    BetaEqN,
}

/// An expansion value with its labelled components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticValue<T> {
    pub value: T,
    pub branch: Branch,
    pub terms: Vec<(&'static str, T)>,
    /// A Γ-pole forced a coefficient to zero.
    pub degenerate: bool,
}

impl<T: Real> AsymptoticValue<T> {
    fn from_terms(branch: Branch, terms: Vec<(&'static str, T)>, degenerate: bool) -> Self {
        let value = terms.iter().fold(T::zero(), |acc, (_, v)| acc + *v);
        Self { value, branch, terms, degenerate }
    }

    /// Sum of two expansions; the terms are concatenated.
    fn plus(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::from_terms(self.branch, terms, self.degenerate || other.degenerate)
    }

    pub fn term(&self, label: &str) -> Option<T> {
        self.terms.iter().find(|(l, _)| *l == label).map(|(_, v)| *v)
    }
}

fn branch_of<T: Real>(m: &Material<T>) -> Branch {
    if m.beta() == m.dim_f() {
        Branch::BetaEqN
    } else {
        Branch::BetaNeN
    }
}

fn gamma_pos<T: Real>(x: T) -> T {
    gamma_fn(x).expect("argument is positive")
}

/// `−μ·2(n+2−β)(n+2)/(δ²(n−β))`.
fn bond_constant<T: Real>(m: &Material<T>) -> T {
    let n = m.dim_f();
    let two = T::lit(2.0);
    -m.mu() * two * (n + two - m.beta()) * (n + two) / (m.delta() * m.delta() * (n - m.beta()))
}

/// `Γ((n+4)/2)Γ((n+4−β)/2)/Γ((β+2)/2)·(2/δ)^{n+2−β}·r^{β−n}`; zero at a pole.
fn bond_power_base<T: Real>(m: &Material<T>, r: T) -> (T, bool) {
    let n = m.dim_f();
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let rg = recip_gamma((m.beta() + two) / two);
    let coeff = gamma_pos((n + four) / two) * gamma_pos((n + four - m.beta()) / two) * rg;
    let scale = (two / m.delta()).powf(n + two - m.beta()) * r.powf(m.beta() - n);
    (coeff * scale, rg == T::zero())
}

/// `−(2μ/δ²)(n+2)` and the bracket `log(δ²/4) + γ − ψ((n+2)/2)`.
fn log_branch_parts<T: Real>(m: &Material<T>) -> (T, T) {
    let n = m.dim_f();
    let two = T::lit(2.0);
    let d2 = m.delta() * m.delta();
    let prefactor = -two * m.mu() / d2 * (n + two);
    let psi = digamma((n + two) / two).expect("positive argument");
    (prefactor, (d2 / T::lit(4.0)).ln() + euler_gamma::<T>() - psi)
}

/// Two-term expansion of `λ2` at radius `r`.
pub fn lambda2_asymptotic<T: Real>(m: &Material<T>, r: T) -> AsymptoticValue<T> {
    let branch = branch_of(m);
    match branch {
        Branch::BetaNeN => {
            let two = T::lit(2.0);
            let (base, degenerate) = bond_power_base(m, r);
            let power = -m.mu() * base / ((m.beta() - m.dim_f()) / two);
            AsymptoticValue::from_terms(branch, vec![("constant", bond_constant(m)), ("power", power)], degenerate)
        }
        Branch::BetaEqN => {
            let (pre, bracket) = log_branch_parts(m);
            AsymptoticValue::from_terms(
                branch,
                vec![("log", pre * T::lit(2.0) * r.ln()), ("constant", pre * bracket)],
                false,
            )
        }
    }
}

fn lambda11<T: Real>(m: &Material<T>, r: T, constant: T) -> AsymptoticValue<T> {
    let branch = branch_of(m);
    match branch {
        Branch::BetaNeN => {
            let n = m.dim_f();
            let two = T::lit(2.0);
            let (base, degenerate) = bond_power_base(m, r);
            let ratio = (n - m.beta() - T::one()) / (n - m.beta());
            let power = -two * m.mu() * ratio * base;
            AsymptoticValue::from_terms(branch, vec![("constant", constant), ("power", power)], degenerate)
        }
        Branch::BetaEqN => {
            let (pre, bracket) = log_branch_parts(m);
            AsymptoticValue::from_terms(
                branch,
                vec![
                    ("log", pre * T::lit(2.0) * r.ln()),
                    ("constant", pre * (bracket + T::lit(2.0))),
                ],
                false,
            )
        }
    }
}

fn lambda12<T: Real>(m: &Material<T>, r: T) -> AsymptoticValue<T> {
    let n = m.dim_f();
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let rg = recip_gamma(m.beta() / two);
    let bracket = gamma_pos((n + two) / two) * gamma_pos((n + four - m.beta()) / two) * rg;
    let scale = (two / m.delta()).powf(two * (n + two - m.beta())) * r.powf(two * (m.beta() - n - T::one()));
    let state = -(m.lambda_star() - m.mu()) * bracket * bracket * scale;
    AsymptoticValue::from_terms(branch_of(m), vec![("state", state)], rg == T::zero())
}

/// Expansions of the bond part `λ_{1,1}` and the state part `λ_{1,2}`.
///
/// When `Γ(β/2)` has a pole the state coefficient is zero and the result is
/// flagged `degenerate`.
pub fn lambda1_component_asymptotics<T: Real>(m: &Material<T>, r: T) -> (AsymptoticValue<T>, AsymptoticValue<T>) {
    (lambda11(m, r, bond_constant(m)), lambda12(m, r))
}

/// The two readings of the combined `λ1` expansion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombinedLambda1<T> {
    /// The direct `λ1` statement, constant `−μ(n+2−β)(n+2)/(δ²(n−β))`.
    pub as_stated: AsymptoticValue<T>,
    /// `λ_{1,1} + λ_{1,2}` from the component expansions.
    pub as_sum: AsymptoticValue<T>,
}

pub fn lambda1_asymptotic_combined<T: Real>(m: &Material<T>, r: T) -> CombinedLambda1<T> {
    let (l11, l12) = lambda1_component_asymptotics(m, r);
    let as_sum = l11.plus(&l12);
    let as_stated = match branch_of(m) {
        Branch::BetaNeN => lambda11(m, r, bond_constant(m) / T::lit(2.0)).plus(&l12),
        Branch::BetaEqN => l11.plus(&l12),
    };
    CombinedLambda1 { as_stated, as_sum }
}

/// How `‖M(k)^{-1}‖` behaves for large `‖k‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "class")]
pub enum GrowthClass {
    /// `β < n`: eigenvalues tend to a constant.
    Bounded,
    /// `β = n`: eigenvalues grow like `log ‖k‖`.
    Logarithmic,
    /// `n < β < n+2`: eigenvalues grow like `‖k‖^{β−n}`.
    Power { exponent: f64 },
}

pub fn growth_class<T: Real>(m: &Material<T>) -> GrowthClass {
    let n = m.dim_f();
    if m.beta() < n {
        GrowthClass::Bounded
    } else if m.beta() == n {
        GrowthClass::Logarithmic
    } else {
        GrowthClass::Power { exponent: (m.beta() - n).to_f64_lossy() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mat(n: usize, delta: f64, beta: f64, mu: f64, ls: f64) -> Material<f64> {
        Material::new(n, delta, beta, mu, ls).unwrap()
    }

    #[test]
    fn lambda2_constant_and_power() {
        let m = mat(1, 1.0, 0.0, 1.0, 1.0);
        let a = lambda2_asymptotic(&m, 10.0);
        assert_eq!(a.branch, Branch::BetaNeN);
        assert_relative_eq!(a.term("constant").unwrap(), -18.0, max_relative = 1e-15);
        // Γ(5/2)²/(−1/2 · Γ(1)) · 2³ / r = 9π / r
        assert_relative_eq!(a.term("power").unwrap(), 9.0 * std::f64::consts::PI / 10.0, max_relative = 1e-13);
    }

    #[test]
    fn log_branch_structure() {
        let m = mat(1, 1.0, 1.0, 1.0, 1.0);
        let r = std::f64::consts::E;
        let a = lambda2_asymptotic(&m, r);
        assert_eq!(a.branch, Branch::BetaEqN);
        // −(2μ/δ²)(n+2) · 2 log r with log r = 1
        assert_relative_eq!(a.term("log").unwrap(), -6.0 * 2.0, max_relative = 1e-15);
        let (l11, _) = lambda1_component_asymptotics(&m, r);
        assert_relative_eq!(l11.value - a.value, -6.0 * 2.0, max_relative = 1e-13);
    }

    #[test]
    fn terms_recompose() {
        for beta in [-1.0, 0.0, 0.5, 1.0, 2.0, 2.5] {
            let m = mat(1, 0.7, beta, 1.2, 2.5);
            for v in [
                lambda2_asymptotic(&m, 33.0),
                lambda1_asymptotic_combined(&m, 33.0).as_sum,
                lambda1_asymptotic_combined(&m, 33.0).as_stated,
            ] {
                let s = v.terms.iter().fold(0.0, |acc, (_, x)| acc + x);
                assert_eq!(s, v.value);
            }
        }
    }

    #[test]
    fn state_part_vanishes_without_contrast() {
        let m = mat(2, 1.0, 1.0, 1.0, 1.0);
        let (l11, l12) = lambda1_component_asymptotics(&m, 50.0);
        assert_eq!(l12.value, 0.0);
        assert_eq!(lambda1_asymptotic_combined(&m, 50.0).as_sum.value, l11.value);
    }

    #[test]
    fn state_part_flat_at_matching_exponent() {
        let m = mat(2, 1.0, 3.0, 1.0, 2.0);
        let (_, a) = lambda1_component_asymptotics(&m, 100.0);
        let (_, b) = lambda1_component_asymptotics(&m, 400.0);
        assert_relative_eq!(a.value, b.value, max_relative = 1e-14);
        assert!(a.value <= 0.0);
    }

    #[test]
    fn pole_is_degenerate() {
        let m = mat(1, 1.0, 0.0, 1.0, 2.0);
        let (_, l12) = lambda1_component_asymptotics(&m, 100.0);
        assert!(l12.degenerate);
        assert_eq!(l12.value, 0.0);
    }

    #[test]
    fn stated_and_summed_agree_on_log_branch() {
        let m = mat(2, 1.0, 2.0, 1.0, 3.0);
        let c = lambda1_asymptotic_combined(&m, 80.0);
        assert_eq!(c.as_stated.value, c.as_sum.value);
        let m = mat(1, 1.0, 0.0, 1.0, 1.0);
        let c = lambda1_asymptotic_combined(&m, 80.0);
        assert_relative_eq!(
            c.as_sum.term("constant").unwrap(),
            2.0 * c.as_stated.term("constant").unwrap(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn growth_classes() {
        assert_eq!(growth_class(&mat(2, 1.0, 1.0, 1.0, 1.0)), GrowthClass::Bounded);
        assert_eq!(growth_class(&mat(2, 1.0, 2.0, 1.0, 1.0)), GrowthClass::Logarithmic);
        assert_eq!(growth_class(&mat(1, 1.0, 2.5, 1.0, 1.0)), GrowthClass::Power { exponent: 1.5 });
    }
}
