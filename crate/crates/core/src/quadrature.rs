//! Adaptive Gauss–Kronrod quadrature for small vector-valued integrands.
//!
//! All components share one set of nodes so the expensive part of an
//! integrand (trigonometric kernels, nested inner integrals) is evaluated
//! once per point.

use thiserror::Error;

use crate::Real;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

/// Gauss weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("adaptive refinement exceeded {intervals} panels (estimated error {error:e})")]
    BudgetExceeded { intervals: usize, error: f64 },
    #[error("integrand produced a non-finite value at x = {x}")]
    NonFinite { x: f64 },
}

/// Stopping parameters for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions<T> {
    pub epsabs: T,
    pub epsrel: T,
    pub max_intervals: usize,
    /// Number of equal panels to start from.
    pub initial_panels: usize,
}

impl<T: Real> Default for QuadratureOptions<T> {
    fn default() -> Self {
        Self {
            epsabs: T::zero(),
            epsrel: T::lit(1e-12).max(T::epsilon() * T::lit(50.0)),
            max_intervals: 4000,
            initial_panels: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T, const D: usize> {
    pub value: [T; D],
    pub error: [T; D],
    pub intervals: usize,
}

#[derive(Clone, Copy)]
struct Panel<T, const D: usize> {
    a: T,
    b: T,
    value: [T; D],
    error: [T; D],
    resabs: [T; D],
}

/// One 21-point Kronrod panel with its embedded error estimate.
fn kronrod_panel<T, const D: usize, F>(f: &F, a: T, b: T) -> Result<Panel<T, D>, QuadratureError>
where
    T: Real,
    F: Fn(T) -> [T; D],
{
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let check = |x: T, v: [T; D]| -> Result<[T; D], QuadratureError> {
        if v.iter().all(|c| c.is_finite()) {
            Ok(v)
        } else {
            Err(QuadratureError::NonFinite { x: x.to_f64_lossy() })
        }
    };

    let fc = check(center, f(center))?;
    let mut kronrod = [T::zero(); D];
    let mut gauss = [T::zero(); D];
    let mut resabs = [T::zero(); D];
    let mut samples = [[T::zero(); D]; 21];
    samples[20] = fc;
    for i in 0..D {
        kronrod[i] = T::lit(WGK[10]) * fc[i];
        resabs[i] = kronrod[i].abs();
    }
    for j in 0..10 {
        let dx = half_len * T::lit(XGK[j]);
        let (x1, x2) = (center - dx, center + dx);
        let f1 = check(x1, f(x1))?;
        let f2 = check(x2, f(x2))?;
        samples[2 * j] = f1;
        samples[2 * j + 1] = f2;
        let wk = T::lit(WGK[j]);
        for i in 0..D {
            kronrod[i] += wk * (f1[i] + f2[i]);
            resabs[i] += wk * (f1[i].abs() + f2[i].abs());
            if j % 2 == 1 {
                gauss[i] += T::lit(WG[j / 2]) * (f1[i] + f2[i]);
            }
        }
    }

    let mut error = [T::zero(); D];
    let scale = half_len.abs();
    for i in 0..D {
        let mean = kronrod[i] * half;
        let mut resasc = T::lit(WGK[10]) * (fc[i] - mean).abs();
        for j in 0..10 {
            resasc += T::lit(WGK[j])
                * ((samples[2 * j][i] - mean).abs() + (samples[2 * j + 1][i] - mean).abs());
        }
        let diff = (kronrod[i] - gauss[i]).abs() * scale;
        let resasc = resasc * scale;
        let absval = resabs[i] * scale;
        // QUADPACK error scaling plus a round-off floor.
        let mut err = diff;
        if resasc != T::zero() && diff != T::zero() {
            err = resasc * T::one().min((T::lit(200.0) * diff / resasc).powf(T::lit(1.5)));
        }
        let floor = T::lit(50.0) * T::epsilon() * absval;
        error[i] = err.max(floor);
        kronrod[i] = kronrod[i] * half_len;
        resabs[i] = absval;
    }

    Ok(Panel { a, b, value: kronrod, error, resabs })
}

/// Adaptive integration of a vector-valued `f` over `[a, b]`.
///
/// Refines the panel whose error is largest relative to its component
/// tolerance until every component satisfies
/// `err ≤ max(epsabs, epsrel·|I|)`.
pub fn integrate<T, const D: usize, F>(
    f: F,
    a: T,
    b: T,
    opts: &QuadratureOptions<T>,
) -> Result<Quadrature<T, D>, QuadratureError>
where
    T: Real,
    F: Fn(T) -> [T; D],
{
    let n0 = opts.initial_panels.max(1);
    let width = (b - a) / T::from_index(n0 as i64);
    let mut panels = Vec::with_capacity(opts.max_intervals.max(n0));
    for j in 0..n0 {
        let lo = a + width * T::from_index(j as i64);
        let hi = if j + 1 == n0 { b } else { lo + width };
        panels.push(kronrod_panel(&f, lo, hi)?);
    }

    loop {
        let mut total = [T::zero(); D];
        let mut total_err = [T::zero(); D];
        for p in &panels {
            for i in 0..D {
                total[i] += p.value[i];
                total_err[i] += p.error[i];
            }
        }
        let tol: [T; D] = std::array::from_fn(|i| opts.epsabs.max(opts.epsrel * total[i].abs()));
        let satisfied = (0..D).all(|i| total_err[i] <= tol[i]);
        if satisfied {
            return Ok(Quadrature { value: total, error: total_err, intervals: panels.len() });
        }

        // Worst panel measured against the per-component tolerance.
        let weight = |p: &Panel<T, D>| -> T {
            (0..D).fold(T::zero(), |acc, i| {
                let t = tol[i].max(T::min_positive_value());
                acc.max(p.error[i] / t)
            })
        };
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0usize, T::neg_infinity()), |(bi, bw), (i, p)| {
                let w = weight(p);
                if w > bw {
                    (i, w)
                } else {
                    (bi, bw)
                }
            });

        let p = panels[worst];
        let mid = T::lit(0.5) * (p.a + p.b);
        let too_narrow = (p.b - p.a).abs() <= T::lit(4.0) * T::epsilon() * (b - a).abs();
        // Round-off limited: the panel is at the resolution limit or its
        // error is already at the level of its own absolute mass.
        let roundoff = (0..D).all(|i| p.error[i] <= T::lit(100.0) * T::epsilon() * p.resabs[i]);
        if too_narrow || roundoff || panels.len() >= opts.max_intervals {
            if panels.len() >= opts.max_intervals {
                let worst_err = (0..D).fold(0.0_f64, |acc, i| acc.max(total_err[i].to_f64_lossy()));
                return Err(QuadratureError::BudgetExceeded { intervals: panels.len(), error: worst_err });
            }
            // Freeze the panel: its error is accepted as irreducible.
            let mut frozen = p;
            frozen.error = [T::zero(); D];
            panels[worst] = frozen;
            continue;
        }
        let left = kronrod_panel(&f, p.a, mid)?;
        let right = kronrod_panel(&f, mid, p.b)?;
        panels[worst] = left;
        panels.push(right);
    }
}

/// Fixed composite rule: `panels` equal 21-point Kronrod panels.
///
/// Used for inner integrals whose integrand is analytic across the range.
pub fn composite<T, const D: usize, F>(f: F, a: T, b: T, panels: usize) -> [T; D]
where
    T: Real,
    F: Fn(T) -> [T; D],
{
    let panels = panels.max(1);
    let half = T::lit(0.5);
    let width = (b - a) / T::from_index(panels as i64);
    let mut total = [T::zero(); D];
    for j in 0..panels {
        let lo = a + width * T::from_index(j as i64);
        let center = lo + half * width;
        let half_len = half * width;
        let fc = f(center);
        for i in 0..D {
            total[i] += T::lit(WGK[10]) * fc[i] * half_len;
        }
        for k in 0..10 {
            let dx = half_len * T::lit(XGK[k]);
            let f1 = f(center - dx);
            let f2 = f(center + dx);
            let wk = T::lit(WGK[k]) * half_len;
            for i in 0..D {
                total[i] += wk * (f1[i] + f2[i]);
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_exact() {
        let q = integrate(|x: f64| [x * x, x.powi(5)], 0.0, 2.0, &QuadratureOptions::default()).unwrap();
        assert_relative_eq!(q.value[0], 8.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(q.value[1], 64.0 / 6.0, max_relative = 1e-15);
    }

    #[test]
    fn algebraic_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let opts = QuadratureOptions { epsrel: 1e-10, ..Default::default() };
        let q = integrate(|x: f64| [x.powf(-0.5)], 0.0, 1.0, &opts).unwrap();
        assert_relative_eq!(q.value[0], 2.0, max_relative = 1e-9);
    }

    #[test]
    fn oscillatory_integrand() {
        // ∫_0^{50} sin(20x) dx
        let q = integrate(|x: f64| [(20.0 * x).sin()], 0.0, 50.0, &QuadratureOptions::default()).unwrap();
        let exact = (1.0 - (1000.0_f64).cos()) / 20.0;
        assert!((q.value[0] - exact).abs() < 1e-11);
    }

    #[test]
    fn composite_rule_on_smooth_integrand() {
        let v = composite(|t: f64| [t.cos().powi(2)], 0.0, std::f64::consts::PI, 4);
        assert_relative_eq!(v[0], std::f64::consts::FRAC_PI_2, max_relative = 1e-14);
    }

    #[test]
    fn budget_exhaustion_reported() {
        let opts = QuadratureOptions { max_intervals: 3, epsrel: 1e-15, ..Default::default() };
        let r = integrate(|x: f64| [(1.0 / (x + 1e-6)).sin()], 0.0, 1.0, &opts);
        assert!(matches!(r, Err(QuadratureError::BudgetExceeded { .. })));
    }

    #[test]
    fn non_finite_reported() {
        let r = integrate(|x: f64| [1.0 / (x - 0.5)], 0.0, 1.0, &QuadratureOptions::default());
        assert!(r.is_err());
    }
}
