//! Heavy-tail diagnostic for the envelope of a utility grid.
//!
//! The envelope at `y` is `max_k |u_k(y)|` over grid points. Inference over
//! the grid relies on this envelope having a finite `(2 + delta)` moment
//! under both sampling distributions; the diagnostic reports the empirical
//! moment and warns when a handful of observations dominate it.

use crate::error::{Error, Result};
use crate::quadrature::{integrate_log_scale, Tolerance};
use crate::utility::{eval_utility, UtilityGrid};

/// Share of observations treated as "the tail".
const TAIL_FRACTION: f64 = 0.01;
/// Tail contribution above which the sample is flagged.
const TAIL_SHARE_LIMIT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeReport {
    /// Empirical mean of `envelope(y)^(2 + delta)`.
    pub moment: f64,
    /// Fraction of the moment contributed by the top 1% of observations.
    pub tail_share: f64,
    pub heavy_tail_warning: bool,
    pub delta: f64,
}

/// Largest absolute utility over the grid at outcome `y`.
pub fn envelope(grid: &UtilityGrid, y: f64) -> Result<f64> {
    grid.points()
        .map(|p| eval_utility(p, y).map(f64::abs))
        .try_fold(0.0f64, |acc, v| v.map(|v| acc.max(v)))
}

pub fn envelope_diagnostic(grid: &UtilityGrid, sample: &[f64], delta: f64) -> Result<EnvelopeReport> {
    if sample.is_empty() {
        return Err(Error::InvalidSample("sample is empty".into()));
    }
    if !(delta >= 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be nonnegative, got {delta}")));
    }
    let power = 2.0 + delta;
    let mut terms = sample
        .iter()
        .map(|&y| envelope(grid, y).map(|e| e.powf(power)))
        .collect::<Result<Vec<f64>>>()?;
    let total: f64 = terms.iter().sum();
    let moment = total / sample.len() as f64;

    terms.sort_by(|a, b| b.total_cmp(a));
    let tail_count = ((TAIL_FRACTION * sample.len() as f64).ceil() as usize).max(1);
    let tail: f64 = terms[..tail_count].iter().sum();
    let tail_share = if total > 0.0 { tail / total } else { 0.0 };

    Ok(EnvelopeReport {
        moment,
        tail_share,
        heavy_tail_warning: tail_share > TAIL_SHARE_LIMIT,
        delta,
    })
}

/// Population `(2 + delta)` moment of the envelope for a law supported on
/// `[lower, inf)`, given its log-density.
///
/// The integrand is assembled in log space so that far tails stay finite
/// where the utility power or the density alone would overflow or underflow.
/// Tails as heavy as `y^(-1.02)` settle only to about `1e-5` relative within
/// the floating-point range, hence the loose tolerance.
pub fn population_envelope_moment<D>(grid: &UtilityGrid, ln_density: D, lower: f64, delta: f64) -> Result<f64>
where
    D: Fn(f64) -> f64,
{
    let power = 2.0 + delta;
    let g = |v: f64| {
        let y = lower + v.exp_m1();
        match envelope(grid, y) {
            Ok(e) if e > 0.0 => {
                let w = (power * e.ln() + ln_density(y) + v).exp();
                if w.is_finite() {
                    w
                } else {
                    0.0
                }
            }
            _ => 0.0,
        }
    };
    let tol = Tolerance {
        abs: 1e-12,
        rel: 1e-4,
        max_intervals: 4000,
    };
    Ok(integrate_log_scale(g, tol)?.value)
}
