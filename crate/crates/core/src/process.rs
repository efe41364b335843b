//! Sample expected utilities and the expected-utility difference field.

use crate::error::{Error, Result};
use crate::utility::{eval_utility, UtilityGrid, UtilityParams};

/// Two independent samples of outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePair {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl SamplePair {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        for (tag, s) in [('A', &a), ('B', &b)] {
            if s.len() < 2 {
                return Err(Error::InvalidSample(format!(
                    "sample {tag} needs at least 2 observations, got {}",
                    s.len()
                )));
            }
            if let Some(i) = s.iter().position(|y| !y.is_finite()) {
                return Err(Error::InvalidSample(format!(
                    "sample {tag} observation {} is not finite",
                    i + 1
                )));
            }
        }
        Ok(Self { a, b })
    }

    pub fn sample_a(&self) -> &[f64] {
        &self.a
    }

    pub fn sample_b(&self) -> &[f64] {
        &self.b
    }

    pub fn n_a(&self) -> usize {
        self.a.len()
    }

    pub fn n_b(&self) -> usize {
        self.b.len()
    }

    /// `n_a / n_b`.
    pub fn lambda(&self) -> f64 {
        self.a.len() as f64 / self.b.len() as f64
    }

    /// The same pair with the roles of A and B exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }
}

/// Utilities of every observation at every grid point, observation-major.
#[derive(Debug, Clone)]
pub struct UtilityMatrix {
    points: usize,
    values: Vec<f64>,
}

impl UtilityMatrix {
    /// Evaluates the grid at each observation. `tag` names the sample in
    /// domain errors.
    pub fn evaluate(sample: &[f64], grid: &UtilityGrid, tag: char) -> Result<Self> {
        let points = grid.len();
        let mut values = Vec::with_capacity(sample.len() * points);
        for (i, &y) in sample.iter().enumerate() {
            for p in grid.points() {
                let u = eval_utility(p, y).map_err(|_| Error::SampleDomain {
                    sample: tag,
                    index: i + 1,
                    y,
                    theta: p.theta,
                    s: p.s,
                })?;
                values.push(u);
            }
        }
        Ok(Self { points, values })
    }

    pub fn observations(&self) -> usize {
        self.values.len().checked_div(self.points).unwrap_or(0)
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.points..(i + 1) * self.points]
    }

    /// Weighted mean `sum(w_i u_i) / sum(w_i)` at every point, written into
    /// `out`, using a running-mean update. Returns the average weight.
    ///
    /// Observations with zero weight are skipped. With unit weights this is
    /// bit-identical to [`UtilityMatrix::means`].
    pub fn weighted_means_into(&self, weights: &[f64], out: &mut [f64]) -> f64 {
        debug_assert_eq!(weights.len(), self.observations());
        debug_assert_eq!(out.len(), self.points);
        out.fill(0.0);
        let mut total = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            total += w;
            let f = w / total;
            for (m, &x) in out.iter_mut().zip(self.row(i)) {
                *m += f * (x - *m);
            }
        }
        total / weights.len() as f64
    }

    /// Sample mean utility at every grid point.
    pub fn means(&self) -> Vec<f64> {
        let ones = vec![1.0; self.observations()];
        let mut out = vec![0.0; self.points];
        self.weighted_means_into(&ones, &mut out);
        out
    }
}

/// Sample average of `u_p(y)`.
pub fn expected_utility_mean(sample: &[f64], p: UtilityParams) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::InvalidSample("sample is empty".into()));
    }
    let mut mean = 0.0;
    for (k, &y) in sample.iter().enumerate() {
        mean += (eval_utility(p, y)? - mean) / (k + 1) as f64;
    }
    Ok(mean)
}

/// Both samples evaluated on one grid.
#[derive(Debug, Clone)]
pub struct PairUtilities {
    pub a: UtilityMatrix,
    pub b: UtilityMatrix,
    mean_a: Vec<f64>,
    mean_b: Vec<f64>,
}

impl PairUtilities {
    pub fn new(pair: &SamplePair, grid: &UtilityGrid) -> Result<Self> {
        let a = UtilityMatrix::evaluate(pair.sample_a(), grid, 'A')?;
        let b = UtilityMatrix::evaluate(pair.sample_b(), grid, 'B')?;
        let mean_a = a.means();
        let mean_b = b.means();
        Ok(Self {
            a,
            b,
            mean_a,
            mean_b,
        })
    }

    pub fn n_a(&self) -> usize {
        self.a.observations()
    }

    pub fn n_b(&self) -> usize {
        self.b.observations()
    }

    pub fn points(&self) -> usize {
        self.a.points()
    }

    pub fn mean_a(&self) -> &[f64] {
        &self.mean_a
    }

    pub fn mean_b(&self) -> &[f64] {
        &self.mean_b
    }

    /// `mean_a - mean_b` per grid point.
    pub fn diff(&self) -> Vec<f64> {
        self.mean_a.iter().zip(&self.mean_b).map(|(a, b)| a - b).collect()
    }

    /// Builds the difference field with per-point scale estimates `sigma`.
    pub fn field(&self, sigma: &[f64]) -> Result<EUDiffField> {
        EUDiffField::new(self.diff(), sigma, self.n_a(), self.n_b())
    }
}

/// Expected-utility differences with their scales and zero-centred t-statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct EUDiffField {
    pub diff: Vec<f64>,
    pub sigma_hat: Vec<f64>,
    pub t0: Vec<f64>,
    pub n_a: usize,
    pub n_b: usize,
}

/// Smallest admissible scale at a point with difference `diff`.
pub fn sigma_floor(diff: f64, n_a: usize) -> f64 {
    1e-12 * (1.0 + diff.abs() * (n_a as f64).sqrt())
}

impl EUDiffField {
    /// Assembles a field from differences and raw scale estimates.
    ///
    /// Scales are floored by [`sigma_floor`] so that degenerate (zero)
    /// estimates never divide by zero.
    pub fn new(diff: Vec<f64>, sigma: &[f64], n_a: usize, n_b: usize) -> Result<Self> {
        if sigma.len() != diff.len() {
            return Err(Error::LengthMismatch {
                what: "scale estimates",
                expected: diff.len(),
                actual: sigma.len(),
            });
        }
        if let Some(bad) = sigma.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "scale estimates must be finite and nonnegative, got {bad}"
            )));
        }
        let root_n = (n_a as f64).sqrt();
        let sigma_hat: Vec<f64> = diff
            .iter()
            .zip(sigma)
            .map(|(&d, &s)| s.max(sigma_floor(d, n_a)))
            .collect();
        let t0 = diff.iter().zip(&sigma_hat).map(|(&d, &s)| root_n * d / s).collect();
        Ok(Self {
            diff,
            sigma_hat,
            t0,
            n_a,
            n_b,
        })
    }

    pub fn len(&self) -> usize {
        self.diff.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diff.is_empty()
    }
}

/// Difference of sample expected utilities over the grid, studentized by `sigma`.
pub fn eu_diff_field(pair: &SamplePair, grid: &UtilityGrid, sigma: &[f64]) -> Result<EUDiffField> {
    if sigma.len() != grid.len() {
        return Err(Error::LengthMismatch {
            what: "scale estimates",
            expected: grid.len(),
            actual: sigma.len(),
        });
    }
    PairUtilities::new(pair, grid)?.field(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::utility::build_grid;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn p(theta: f64, s: f64) -> UtilityParams {
        UtilityParams::new(theta, s).unwrap()
    }

    #[test]
    fn sample_means() {
        assert_eq!(expected_utility_mean(&[1.0, 3.0], p(0.0, 0.0)).unwrap(), 1.0);
        assert_relative_eq!(
            expected_utility_mean(&[1.0, E * E], p(1.0, 0.0)).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(expected_utility_mean(&[2.0], p(2.0, 0.0)).unwrap(), 0.5, epsilon = 1e-15);
        assert!(expected_utility_mean(&[], p(0.0, 0.0)).is_err());
        assert!(expected_utility_mean(&[1.0, -1.0], p(0.0, 0.0)).is_err());
    }

    #[test]
    fn identical_samples_give_zero_field() {
        let grid = build_grid(0.0, 3.0, 0.5, -0.1, 0.2, 0.1).unwrap();
        let a = vec![0.3, 1.2, 4.5, 2.2];
        let pair = SamplePair::new(a.clone(), a).unwrap();
        let f = eu_diff_field(&pair, &grid, &vec![1.0; grid.len()]).unwrap();
        assert!(f.diff.iter().all(|&d| d == 0.0));
        assert!(f.t0.iter().all(|&t| t == 0.0));
    }

    #[test]
    fn hand_computed_differences() {
        // b has one observation only for this arithmetic check; build the
        // matrices directly because SamplePair needs two per sample.
        let grid = UtilityGrid::new(vec![0.0, 1.0], vec![0.0]).unwrap();
        let ua = UtilityMatrix::evaluate(&[1.0, 3.0], &grid, 'A').unwrap();
        let ub = UtilityMatrix::evaluate(&[2.0], &grid, 'B').unwrap();
        let (ma, mb) = (ua.means(), ub.means());
        assert_eq!(ma[0] - mb[0], 0.0);
        // oracle: (ln 1 + ln 3) / 2 - ln 2
        let oracle = (0.0 + 3f64.ln()) / 2.0 - 2f64.ln();
        assert_relative_eq!(ma[1] - mb[1], oracle, epsilon = 1e-15);
        assert_relative_eq!(ma[1] - mb[1], -0.143_841_036_225_890_4, epsilon = 1e-15);
    }

    #[test]
    fn field_validation() {
        let grid = build_grid(0.0, 1.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        let pair = SamplePair::new(vec![1.0, 2.0], vec![2.0, 3.0]).unwrap();
        assert!(matches!(
            eu_diff_field(&pair, &grid, &[1.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(eu_diff_field(&pair, &grid, &[1.0, -1.0]).is_err());
        let f = eu_diff_field(&pair, &grid, &[0.0, 0.0]).unwrap();
        assert!(f.sigma_hat.iter().all(|&s| s > 0.0));
        assert!(f.t0.iter().all(|t| t.is_finite()));
        assert!(SamplePair::new(vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(SamplePair::new(vec![1.0, f64::NAN], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn domain_error_names_observation() {
        let grid = build_grid(0.0, 1.0, 1.0, 0.0, 0.5, 0.5).unwrap();
        let pair = SamplePair::new(vec![1.0, 2.0], vec![2.0, 0.5]).unwrap();
        let err = PairUtilities::new(&pair, &grid).unwrap_err();
        assert_eq!(
            err,
            Error::SampleDomain {
                sample: 'B',
                index: 2,
                y: 0.5,
                theta: 0.0,
                s: 0.5
            }
        );
    }

    #[test]
    fn lambda_is_size_ratio() {
        let pair = SamplePair::new(vec![1.0; 6], vec![1.0; 4]).unwrap();
        assert_eq!(pair.lambda(), 1.5);
    }

    fn samples() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (
            prop::collection::vec(0.05f64..50.0, 2..30),
            prop::collection::vec(0.05f64..50.0, 2..30),
        )
    }

    proptest! {
        #[test]
        fn swapping_samples_negates_diff((a, b) in samples()) {
            let grid = build_grid(0.0, 3.0, 0.5, -0.04, 0.0, 0.02).unwrap();
            let pair = SamplePair::new(a, b).unwrap();
            let d1 = PairUtilities::new(&pair, &grid).unwrap().diff();
            let d2 = PairUtilities::new(&pair.swapped(), &grid).unwrap().diff();
            for (x, y) in d1.iter().zip(&d2) {
                prop_assert_eq!(*x, -*y);
            }
        }

        #[test]
        fn t0_identity((a, b) in samples(), scale in 0.01f64..10.0) {
            let grid = build_grid(0.0, 2.0, 0.5, 0.0, 0.0, 1.0).unwrap();
            let pair = SamplePair::new(a, b).unwrap();
            let sigma: Vec<f64> = (0..grid.len()).map(|k| scale * (1.0 + k as f64)).collect();
            let f = eu_diff_field(&pair, &grid, &sigma).unwrap();
            let root_n = (pair.n_a() as f64).sqrt();
            for k in 0..f.len() {
                let expect = root_n * f.diff[k] / f.sigma_hat[k];
                prop_assert!((f.t0[k] - expect).abs() <= 1e-12 * expect.abs().max(1e-300));
            }
        }

        #[test]
        fn constant_added_to_utility_leaves_diff_unchanged((a, b) in samples(), c in -100.0f64..100.0) {
            // generic mean over an arbitrary utility, shifted by c
            let mean = |s: &[f64], g: &dyn Fn(f64) -> f64| s.iter().map(|&y| g(y)).sum::<f64>() / s.len() as f64;
            let u = |y: f64| (y + 0.1).ln();
            let v = |y: f64| (y + 0.1).ln() + c;
            let d_u = mean(&a, &u) - mean(&b, &u);
            let d_v = mean(&a, &v) - mean(&b, &v);
            prop_assert!((d_u - d_v).abs() <= 1e-10 * (1.0 + c.abs()));
        }
    }
}
