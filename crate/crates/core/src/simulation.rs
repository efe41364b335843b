//! Lognormal coverage experiments.
//!
//! Two lognormal populations are compared over a grid of shifted CRRA
//! utilities. True expected utilities come from quadrature, so each
//! simulated band and confidence-set pair can be scored against the truth.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bootstrap::{bootstrap_from_utilities, scale_estimates, BootstrapConfig, Studentized, WeightScheme};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::inference::{band_at_level, BandVariant};
use crate::process::{PairUtilities, SamplePair};
use crate::quadrature::{integrate, Tolerance};
use crate::rng::{derive_seed, substream, TAG_A, TAG_B};
use crate::utility::{crra, build_axis, UtilityGrid, UtilityParams};

/// Half-width of the standard-normal range used by the oracle; the mass
/// outside is below 1e-20.
const Z_RANGE: f64 = 10.0;

/// `Y = exp(mu + sigma * Z)` with `Z` standard normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LognormalDGP {
    pub mu: f64,
    pub sigma: f64,
}

impl LognormalDGP {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() || !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "lognormal needs finite mu and positive sigma, got ({mu}, {sigma})"
            )));
        }
        Ok(Self { mu, sigma })
    }

    pub fn mean(&self) -> f64 {
        (self.mu + 0.5 * self.sigma * self.sigma).exp()
    }
}

pub fn draw_dgp_sample<R: Rng + ?Sized>(dgp: &LognormalDGP, n: usize, rng: &mut R) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            (dgp.mu + dgp.sigma * z).exp()
        })
        .collect()
}

/// `E[u_p(Y)]` by adaptive Gauss–Kronrod over the normal quantile scale.
pub fn true_eu_oracle(dgp: &LognormalDGP, p: UtilityParams) -> Result<f64> {
    let y_min = (dgp.mu - Z_RANGE * dgp.sigma).exp();
    if !(y_min - p.s > 0.0) {
        return Err(Error::Domain {
            theta: p.theta,
            s: p.s,
            y: y_min,
        });
    }
    let norm = 1.0 / (2.0 * PI).sqrt();
    let integrand = |z: f64| {
        let y = (dgp.mu + dgp.sigma * z).exp();
        crra(p.theta, y - p.s) * norm * (-0.5 * z * z).exp()
    };
    let tol = Tolerance {
        abs: 1e-13,
        rel: 1e-8,
        max_intervals: 2000,
    };
    Ok(integrate(integrand, -Z_RANGE, Z_RANGE, tol)?.value)
}

/// `E[u(Y_a)] - E[u(Y_b)]` at every grid point.
pub fn true_differences(dgp_a: &LognormalDGP, dgp_b: &LognormalDGP, grid: &UtilityGrid) -> Result<Vec<f64>> {
    grid.points()
        .map(|p| Ok(true_eu_oracle(dgp_a, p)? - true_eu_oracle(dgp_b, p)?))
        .collect()
}

/// The population consensus set on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TrueSet {
    pub grid: UtilityGrid,
    pub diff: Vec<f64>,
    pub mask: Vec<bool>,
}

impl TrueSet {
    /// Maximal runs of consecutive theta values inside the set, for the
    /// shift at index `s_index`.
    pub fn theta_intervals(&self, s_index: usize) -> Vec<(f64, f64)> {
        theta_runs(&self.grid, &self.mask, s_index)
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&m| m)
    }
}

/// Runs of `true` along the theta axis at one shift.
pub fn theta_runs(grid: &UtilityGrid, mask: &[bool], s_index: usize) -> Vec<(f64, f64)> {
    let ns = grid.s_axis().len();
    let thetas = grid.theta_axis();
    let mut runs = Vec::new();
    let mut start: Option<usize> = None;
    for i in 0..=thetas.len() {
        let inside = i < thetas.len() && mask[i * ns + s_index];
        match (inside, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((thetas[s], thetas[i - 1]));
                start = None;
            }
            _ => {}
        }
    }
    runs
}

/// Formats theta runs as `[0.0, 2.8]`, joining several with ` U `; `{}` when empty.
pub fn format_runs(runs: &[(f64, f64)]) -> String {
    if runs.is_empty() {
        return "{}".to_string();
    }
    runs.iter()
        .map(|(a, b)| format!("[{a:.1}, {b:.1}]"))
        .collect::<Vec<_>>()
        .join(" U ")
}

impl fmt::Display for TrueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..self.grid.s_axis().len())
            .map(|j| format_runs(&self.theta_intervals(j)))
            .collect();
        f.write_str(&parts.join("; "))
    }
}

pub fn true_consensus_set(dgp_a: &LognormalDGP, dgp_b: &LognormalDGP, grid: &UtilityGrid) -> Result<TrueSet> {
    let diff = true_differences(dgp_a, dgp_b, grid)?;
    let mask = diff.iter().map(|&d| d > 0.0).collect();
    Ok(TrueSet {
        grid: grid.clone(),
        diff,
        mask,
    })
}

/// One cell of the experimental design; population A is shared by all rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignRow {
    pub n_a: usize,
    pub n_b: usize,
    pub sigma_b: f64,
    pub mu_b: f64,
}

fn default_dgp_a() -> LognormalDGP {
    LognormalDGP { mu: 0.0, sigma: 1.0 }
}
fn default_shift() -> f64 {
    -0.1
}
fn default_theta_max() -> f64 {
    3.0
}
fn default_theta_step() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub sims: usize,
    pub reps: usize,
    pub alpha: f64,
    #[serde(default)]
    pub scheme: WeightScheme,
    #[serde(default = "default_dgp_a")]
    pub dgp_a: LognormalDGP,
    /// Shift `s` of the utilities; `-0.1` adds 0.1 to every outcome.
    #[serde(default = "default_shift")]
    pub shift: f64,
    #[serde(default)]
    pub theta_min: f64,
    #[serde(default = "default_theta_max")]
    pub theta_max: f64,
    #[serde(default = "default_theta_step")]
    pub theta_step: f64,
    pub rows: Vec<DesignRow>,
}

impl ExperimentConfig {
    /// The 18-cell lognormal design: `n in {40, 100}`, `sigma_b in {0.7, 1.0, 1.3}`,
    /// `mu_b in {-0.3, 0, 0.3}`, at 90% nominal level.
    pub fn lognormal_design(sims: usize, reps: usize, seed: u64) -> Self {
        let mut rows = Vec::new();
        for n in [40, 100] {
            for sigma_b in [0.7, 1.0, 1.3] {
                for mu_b in [-0.3, 0.0, 0.3] {
                    rows.push(DesignRow {
                        n_a: n,
                        n_b: n,
                        sigma_b,
                        mu_b,
                    });
                }
            }
        }
        Self {
            seed,
            sims,
            reps,
            alpha: 0.10,
            scheme: WeightScheme::Multinomial,
            dgp_a: default_dgp_a(),
            shift: default_shift(),
            theta_min: 0.0,
            theta_max: default_theta_max(),
            theta_step: default_theta_step(),
            rows,
        }
    }

    pub fn grid(&self) -> Result<UtilityGrid> {
        UtilityGrid::new(
            build_axis(self.theta_min, self.theta_max, self.theta_step)?,
            vec![self.shift],
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.sims == 0 {
            return Err(Error::InvalidArgument("sims must be at least 1".into()));
        }
        if self.reps < 4 {
            return Err(Error::InvalidArgument("reps must be at least 4".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.rows.is_empty() {
            return Err(Error::InvalidArgument("experiment has no rows".into()));
        }
        for r in &self.rows {
            if r.n_a < 2 || r.n_b < 2 {
                return Err(Error::InvalidArgument("sample sizes must be at least 2".into()));
            }
            LognormalDGP::new(r.mu_b, r.sigma_b)?;
        }
        LognormalDGP::new(self.dgp_a.mu, self.dgp_a.sigma)?;
        self.grid()?;
        Ok(())
    }
}

/// How one simulated dataset fared against the truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimOutcome {
    pub band_covers: bool,
    /// Inner set contained in the true set.
    pub inner_covers: bool,
    /// Outer set contains the true set.
    pub outer_covers: bool,
}

/// Coverage counts for one design row.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageRow {
    pub design: DesignRow,
    pub true_set: TrueSet,
    pub sims: usize,
    pub band_count: usize,
    pub both_count: usize,
    pub inner_count: usize,
    pub outer_count: usize,
}

impl CoverageRow {
    fn frac(&self, count: usize) -> f64 {
        count as f64 / self.sims as f64
    }

    pub fn band_cp(&self) -> f64 {
        self.frac(self.band_count)
    }

    pub fn both_sets_cp(&self) -> f64 {
        self.frac(self.both_count)
    }

    pub fn inner_cp(&self) -> f64 {
        self.frac(self.inner_count)
    }

    pub fn outer_cp(&self) -> f64 {
        self.frac(self.outer_count)
    }

    /// Simulations in which both the inner and the outer set failed.
    pub fn double_failures(&self) -> usize {
        self.sims + self.both_count - self.inner_count - self.outer_count
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub seed: u64,
    pub sims: usize,
    pub reps: usize,
    pub alpha: f64,
    pub scheme: WeightScheme,
    pub rows: Vec<CoverageRow>,
}

/// Draws one dataset, builds the symmetric band and joint sets, and scores them.
pub fn simulate_once(
    config: &ExperimentConfig,
    dgp_b: &LognormalDGP,
    design: &DesignRow,
    grid: &UtilityGrid,
    truth: &[f64],
    sim_seed: u64,
    execution: Execution,
) -> Result<SimOutcome> {
    let a = draw_dgp_sample(&config.dgp_a, design.n_a, &mut substream(sim_seed, &[TAG_A]));
    let b = draw_dgp_sample(dgp_b, design.n_b, &mut substream(sim_seed, &[TAG_B]));
    let pair = SamplePair::new(a, b)?;
    let pu = PairUtilities::new(&pair, grid)?;
    let boot = BootstrapConfig {
        scheme: config.scheme,
        reps: config.reps,
        seed: derive_seed(sim_seed, &[2]),
        execution,
    };
    let draws = bootstrap_from_utilities(&pu, &boot)?;
    let field = pu.field(&scale_estimates(&draws)?.sigma)?;
    let t = Studentized::new(&draws, &field.sigma_hat)?;
    let band = band_at_level(&field, &t, config.alpha, BandVariant::Symmetric)?;
    let (inner, outer) = band.sets();
    let in_truth = truth.iter().map(|&d| d > 0.0);
    let inner_covers = inner.iter().zip(in_truth.clone()).all(|(&i, c)| !i || c);
    let outer_covers = outer.iter().zip(in_truth).all(|(&o, c)| !c || o);
    Ok(SimOutcome {
        band_covers: band.covers(truth),
        inner_covers,
        outer_covers,
    })
}

/// Runs one design row; simulations are spread over `execution`.
pub fn run_row(
    config: &ExperimentConfig,
    row_index: usize,
    grid: &UtilityGrid,
    execution: Execution,
) -> Result<CoverageRow> {
    let design = config.rows[row_index];
    let dgp_b = LognormalDGP::new(design.mu_b, design.sigma_b)?;
    let true_set = true_consensus_set(&config.dgp_a, &dgp_b, grid)?;
    let outcomes = execution.map_indices(config.sims, |j| {
        let sim_seed = derive_seed(config.seed, &[row_index as u64, j as u64]);
        simulate_once(
            config,
            &dgp_b,
            &design,
            grid,
            &true_set.diff,
            sim_seed,
            Execution::Sequential,
        )
    });
    let mut row = CoverageRow {
        design,
        true_set,
        sims: config.sims,
        band_count: 0,
        both_count: 0,
        inner_count: 0,
        outer_count: 0,
    };
    for o in outcomes {
        let o = o?;
        row.band_count += o.band_covers as usize;
        row.inner_count += o.inner_covers as usize;
        row.outer_count += o.outer_covers as usize;
        row.both_count += (o.inner_covers && o.outer_covers) as usize;
    }
    Ok(row)
}

/// Runs every row, reporting each one to `on_row` as soon as it finishes.
pub fn run_coverage_experiment_with<F>(
    config: &ExperimentConfig,
    execution: Execution,
    mut on_row: F,
) -> Result<CoverageReport>
where
    F: FnMut(usize, &CoverageRow) -> Result<()>,
{
    config.validate()?;
    let grid = config.grid()?;
    let mut rows = Vec::with_capacity(config.rows.len());
    for i in 0..config.rows.len() {
        let row = run_row(config, i, &grid, execution)?;
        on_row(i, &row)?;
        rows.push(row);
    }
    Ok(CoverageReport {
        seed: config.seed,
        sims: config.sims,
        reps: config.reps,
        alpha: config.alpha,
        scheme: config.scheme,
        rows,
    })
}

pub fn run_coverage_experiment(config: &ExperimentConfig, execution: Execution) -> Result<CoverageReport> {
    run_coverage_experiment_with(config, execution, |_, _| Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::utility::build_grid;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn std_lognormal() -> LognormalDGP {
        LognormalDGP::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn degenerate_lognormal_is_constant() {
        let dgp = LognormalDGP::new(0.7, 1e-12).unwrap();
        let s = draw_dgp_sample(&dgp, 50, &mut ChaCha8Rng::seed_from_u64(5));
        assert!(s.iter().all(|&y| (y - 0.7f64.exp()).abs() < 1e-9));
        let again = draw_dgp_sample(&dgp, 50, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(s, again);
        assert!(LognormalDGP::new(0.0, 0.0).is_err());
    }

    #[test]
    fn lognormal_sample_mean() {
        let s = draw_dgp_sample(&std_lognormal(), 1_000_000, &mut ChaCha8Rng::seed_from_u64(11));
        let mean = s.iter().sum::<f64>() / s.len() as f64;
        assert!((mean - 0.5f64.exp()).abs() < 0.02, "mean {mean}");
        assert!(s.iter().all(|&y| y > 0.0));
    }

    #[test]
    fn linear_utility_oracle_matches_closed_form() {
        let v = true_eu_oracle(&std_lognormal(), UtilityParams::new(0.0, -0.1).unwrap()).unwrap();
        // E[Y + 0.1 - 1] = e^0.5 - 0.9
        assert_relative_eq!(v, 0.5f64.exp() - 0.9, max_relative = 1e-8);
        assert_relative_eq!(v, 0.748_72, epsilon = 1e-5);
    }

    #[test]
    fn log_utility_oracle_matches_monte_carlo() {
        let p = UtilityParams::new(1.0, -0.1).unwrap();
        let oracle = true_eu_oracle(&std_lognormal(), p).unwrap();
        let n = 10_000_000;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let (mut sum, mut sq) = (0.0, 0.0);
        for y in draw_dgp_sample(&std_lognormal(), n, &mut rng) {
            let u = (y + 0.1).ln();
            sum += u;
            sq += u * u;
        }
        let mean = sum / n as f64;
        let se = ((sq / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - oracle).abs() < 3.0 * se, "oracle {oracle} mc {mean} se {se}");
    }

    #[test]
    fn oracle_rejects_positive_shift_on_lognormal() {
        assert!(true_eu_oracle(&std_lognormal(), UtilityParams::new(1.0, 0.5).unwrap()).is_err());
    }

    #[test]
    fn identical_laws_have_empty_truth() {
        let grid = build_grid(0.0, 3.0, 0.1, -0.1, -0.1, 1.0).unwrap();
        let t = true_consensus_set(&std_lognormal(), &std_lognormal(), &grid).unwrap();
        assert!(t.is_empty());
        assert!(t.diff.iter().all(|&d| d == 0.0));
        assert_eq!(t.to_string(), "{}");
    }

    #[test]
    fn run_formatting() {
        let grid = UtilityGrid::new(vec![0.0, 0.1, 0.2, 0.30000000000000004, 0.4], vec![0.0]).unwrap();
        let runs = theta_runs(&grid, &[true, true, false, true, true], 0);
        assert_eq!(format_runs(&runs), "[0.0, 0.1] U [0.3, 0.4]");
    }

    #[test]
    fn tiny_experiment_bookkeeping() {
        let mut cfg = ExperimentConfig::lognormal_design(3, 19, 8);
        cfg.rows.truncate(2);
        let report = run_coverage_experiment(&cfg, Execution::Parallel).unwrap();
        for row in &report.rows {
            assert_eq!(row.sims, 3);
            assert!(row.both_count <= row.inner_count.min(row.outer_count));
            assert_eq!(
                row.inner_count + row.outer_count + row.double_failures(),
                row.sims + row.both_count
            );
            for cp in [row.band_cp(), row.both_sets_cp(), row.inner_cp(), row.outer_cp()] {
                assert_eq!((cp * 3.0).round() / 3.0, cp);
            }
        }
        let seq = run_coverage_experiment(&cfg, Execution::Sequential).unwrap();
        assert_eq!(report, seq);
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = ExperimentConfig::lognormal_design(0, 19, 1);
        assert!(cfg.validate().is_err());
        cfg.sims = 1;
        cfg.reps = 3;
        assert!(cfg.validate().is_err());
        cfg.reps = 9;
        cfg.rows[0].sigma_b = -1.0;
        assert!(cfg.validate().is_err());
    }
}
