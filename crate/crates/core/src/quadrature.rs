//! Globally adaptive 15-point Gauss–Kronrod quadrature.

use crate::error::{Error, Result};

// Kronrod abscissae on [-1, 1] (nonnegative half); odd indices are the
// 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-12,
            rel: 1e-8,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over the finite interval `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the total
/// error satisfies `max(abs, rel * |value|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    let mut segments = vec![kronrod15(&f, a, b)];
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::NonConvergence {
                estimate: value,
                error,
                intervals: segments.len(),
            });
        }
        if error <= tol.abs.max(tol.rel * value.abs()) {
            return Ok(Estimate {
                value,
                error,
                intervals: segments.len(),
            });
        }
        if segments.len() >= tol.max_intervals {
            return Err(Error::NonConvergence {
                estimate: value,
                error,
                intervals: segments.len(),
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one segment");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        segments.push(kronrod15(&f, seg.a, mid));
        segments.push(kronrod15(&f, mid, seg.b));
    }
}

/// Largest `v` visited by [`integrate_log_scale`]; `e^700` is close to the
/// top of the `f64` range.
pub const V_MAX: f64 = 700.0;

/// Integrates `g` over `v in [0, V_MAX]` on the doubling segments
/// `[0, 1], [1, 2], [2, 4], ...`.
///
/// Stops early once two consecutive segments are negligible against the
/// running total. If `V_MAX` is reached, the last segment's magnitude is
/// added to the error as a bound on the unreached tail; non-integrable tails
/// therefore surface as [`Error::NonConvergence`].
pub fn integrate_log_scale<F: Fn(f64) -> f64>(g: F, tol: Tolerance) -> Result<Estimate> {
    let (mut a, mut b) = (0.0, 1.0);
    let (mut value, mut error, mut intervals) = (0.0, 0.0, 0);
    let mut quiet = 0;
    loop {
        let seg = integrate(&g, a, b, tol)?;
        value += seg.value;
        error += seg.error;
        intervals += seg.intervals;
        let allowed = |v: f64| tol.abs.max(tol.rel * v.abs());
        quiet = if seg.value.abs() <= allowed(value) { quiet + 1 } else { 0 };
        if quiet >= 2 {
            return Ok(Estimate { value, error, intervals });
        }
        if b >= V_MAX {
            error += seg.value.abs();
            return if error <= allowed(value) {
                Ok(Estimate { value, error, intervals })
            } else {
                Err(Error::NonConvergence {
                    estimate: value,
                    error,
                    intervals,
                })
            };
        }
        a = b;
        b = (2.0 * b).min(V_MAX);
    }
}

/// Integrates `f` over `[lower, inf)` through `y = lower + expm1(v)`, which
/// turns tails decaying like `y^(-1 - eps)` into `exp(-eps * v)`.
///
/// Points where `f` is not finite count as zero.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, lower: f64, tol: Tolerance) -> Result<Estimate> {
    let g = |v: f64| {
        let value = f(lower + v.exp_m1()) * v.exp();
        if value.is_finite() {
            value
        } else {
            0.0
        }
    };
    integrate_log_scale(g, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_are_exact() {
        let est = integrate(|x| 3.0 * x * x - x + 2.0, -1.0, 2.0, Tolerance::default()).unwrap();
        assert_relative_eq!(est.value, 13.5, epsilon = 1e-13);
        assert_eq!(est.intervals, 1);
    }

    #[test]
    fn smooth_and_peaked_integrands() {
        let est = integrate(f64::exp, 0.0, 1.0, Tolerance::default()).unwrap();
        assert_relative_eq!(est.value, std::f64::consts::E - 1.0, epsilon = 1e-12);
        // sqrt singularity at the endpoint needs subdivision
        let est = integrate(f64::sqrt, 0.0, 1.0, Tolerance::default()).unwrap();
        assert_relative_eq!(est.value, 2.0 / 3.0, max_relative = 1e-8);
        assert!(est.intervals > 1);
    }

    #[test]
    fn semi_infinite_ranges() {
        let est = integrate_to_infinity(|x| (-x).exp(), 0.0, Tolerance::default()).unwrap();
        assert_relative_eq!(est.value, 1.0, max_relative = 1e-8);
        let est = integrate_to_infinity(|x| 1.0 / (1.0 + x * x), 0.0, Tolerance::default()).unwrap();
        assert_relative_eq!(est.value, PI / 2.0, max_relative = 1e-8);
        // heavy tail: integral of x^-1.05 over [1, inf) is 20
        let est = integrate_to_infinity(|x| x.powf(-1.05), 1.0, Tolerance::default()).unwrap();
        assert_relative_eq!(est.value, 20.0, max_relative = 1e-6);
    }

    #[test]
    fn divergent_integral_reports_non_convergence() {
        let tol = Tolerance {
            max_intervals: 200,
            ..Tolerance::default()
        };
        let err = integrate(|x| 1.0 / x, 0.0, 1.0, tol).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
        let err = integrate_to_infinity(|x| 1.0 / x, 1.0, Tolerance::default()).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }
}
