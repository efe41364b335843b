//! Shifted constant-relative-risk-aversion utilities and their parameter grid.
//!
//! A utility is indexed by risk aversion `theta >= 0` and a shift `s`:
//!
//! ```text
//! u(y) = ln(y - s)                              theta = 1
//! u(y) = ((y - s)^(1 - theta) - 1) / (1 - theta)  otherwise
//! ```
//!
//! defined for `y > s`.

use crate::error::{Error, Result};

/// Below this distance from 1 the log branch is used.
pub const LOG_BRANCH_TOLERANCE: f64 = 1e-8;

/// Relative slack when deciding whether an axis maximum lands on the progression.
const GRID_ENDPOINT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityParams {
    pub theta: f64,
    pub s: f64,
}

impl UtilityParams {
    pub fn new(theta: f64, s: f64) -> Result<Self> {
        if !theta.is_finite() || theta < 0.0 {
            return Err(Error::InvalidParams(format!(
                "theta must be finite and nonnegative, got {theta}"
            )));
        }
        if !s.is_finite() {
            return Err(Error::InvalidParams(format!("shift must be finite, got {s}")));
        }
        Ok(Self { theta, s })
    }

    /// Evaluates `u_{theta,s}(y)`.
    pub fn eval(&self, y: f64) -> Result<f64> {
        eval_utility(*self, y)
    }
}

/// Evaluates the shifted CRRA utility at `y`; fails when `y - s <= 0`.
pub fn eval_utility(p: UtilityParams, y: f64) -> Result<f64> {
    let x = y - p.s;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            theta: p.theta,
            s: p.s,
            y,
        });
    }
    Ok(crra(p.theta, x))
}

/// CRRA utility of a positive argument, without the domain check.
///
/// `expm1` keeps the power branch accurate when `theta` is close to 1.
#[inline]
pub(crate) fn crra(theta: f64, x: f64) -> f64 {
    let k = 1.0 - theta;
    let ln_x = x.ln();
    if k.abs() <= LOG_BRANCH_TOLERANCE {
        ln_x
    } else {
        (k * ln_x).exp_m1() / k
    }
}

/// Finite discretization of the `(theta, s)` parameter rectangle.
///
/// Points are stored theta-major: index `i * s_axis.len() + j` is
/// `(theta_axis[i], s_axis[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityGrid {
    theta_axis: Vec<f64>,
    s_axis: Vec<f64>,
}

impl UtilityGrid {
    pub fn new(theta_axis: Vec<f64>, s_axis: Vec<f64>) -> Result<Self> {
        check_axis("theta", &theta_axis)?;
        check_axis("s", &s_axis)?;
        if theta_axis[0] < 0.0 {
            return Err(Error::InvalidParams(format!(
                "theta axis starts at {} but theta must be nonnegative",
                theta_axis[0]
            )));
        }
        Ok(Self { theta_axis, s_axis })
    }

    pub fn theta_axis(&self) -> &[f64] {
        &self.theta_axis
    }

    pub fn s_axis(&self) -> &[f64] {
        &self.s_axis
    }

    pub fn len(&self) -> usize {
        self.theta_axis.len() * self.s_axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, index: usize) -> UtilityParams {
        let ns = self.s_axis.len();
        UtilityParams {
            theta: self.theta_axis[index / ns],
            s: self.s_axis[index % ns],
        }
    }

    /// `(theta index, s index)` of a flat point index.
    pub fn coords(&self, index: usize) -> (usize, usize) {
        let ns = self.s_axis.len();
        (index / ns, index % ns)
    }

    pub fn points(&self) -> impl Iterator<Item = UtilityParams> + '_ {
        (0..self.len()).map(move |k| self.point(k))
    }

    /// Largest shift on the grid; every outcome must exceed it.
    pub fn max_shift(&self) -> f64 {
        *self.s_axis.last().expect("grid axes are nonempty")
    }
}

fn check_axis(name: &str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::EmptyGrid(format!("{name} axis has no points")));
    }
    if axis.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParams(format!("{name} axis has non-finite values")));
    }
    if axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams(format!(
            "{name} axis must be strictly increasing"
        )));
    }
    Ok(())
}

/// Inclusive arithmetic progression `min, min + step, ...` up to `max`.
///
/// `max` itself is included when `(max - min) / step` is within `1e-9` of an
/// integer; otherwise the axis stops at the last step below `max`.
pub fn build_axis(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite() && step.is_finite()) {
        return Err(Error::EmptyGrid("axis bounds must be finite".into()));
    }
    if step <= 0.0 {
        return Err(Error::EmptyGrid(format!("step must be positive, got {step}")));
    }
    if min > max {
        return Err(Error::EmptyGrid(format!("min {min} exceeds max {max}")));
    }
    let span = (max - min) / step;
    let nearest = span.round();
    let on_grid = (span - nearest).abs() <= GRID_ENDPOINT_TOLERANCE * nearest.max(1.0);
    let last = if on_grid { nearest } else { span.floor() } as usize;
    let mut axis: Vec<f64> = (0..=last).map(|k| min + k as f64 * step).collect();
    if on_grid {
        axis[last] = max;
    }
    Ok(axis)
}

pub fn build_grid(
    theta_min: f64,
    theta_max: f64,
    theta_step: f64,
    s_min: f64,
    s_max: f64,
    s_step: f64,
) -> Result<UtilityGrid> {
    let theta_axis = build_axis(theta_min, theta_max, theta_step)?;
    let s_axis = build_axis(s_min, s_max, s_step)?;
    UtilityGrid::new(theta_axis, s_axis)
}
