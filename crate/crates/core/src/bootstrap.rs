//! Exchangeable bootstrap for the expected-utility difference process.
//!
//! Each replicate draws nonnegative exchangeable weights for both samples and
//! evaluates the centred, weighted difference process
//!
//! ```text
//! G(f) = sqrt(n_a) * [ (P~_a - P~_b) - (Wbar_a * P^_a - Wbar_b * P^_b) ] f / c
//! ```
//!
//! where `P~` is the weighted empirical measure and `P^` the plain one. Scale
//! estimates come from the bootstrap interquartile range, and sup-t critical
//! values from order statistics of per-replicate extremes.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::process::{PairUtilities, SamplePair};
use crate::rng::{substream, TAG_A, TAG_B};
use crate::utility::UtilityGrid;

/// Interquartile range of the standard normal, `z_0.75 - z_0.25`.
pub const NORMAL_IQR: f64 = 1.348_979_500_392_163_5;

/// Slack when converting `q * R` to an order-statistic index.
const INDEX_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightScheme {
    /// Multinomial counts: the usual empirical bootstrap.
    #[default]
    Multinomial,
    /// Independent standard exponential weights: the Bayesian bootstrap.
    Bayesian,
}

impl WeightScheme {
    /// Limit of the weights' standard deviation; the process is divided by it.
    pub fn c(self) -> f64 {
        match self {
            WeightScheme::Multinomial | WeightScheme::Bayesian => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WeightScheme::Multinomial => "multinomial",
            WeightScheme::Bayesian => "bayesian",
        }
    }
}

impl std::str::FromStr for WeightScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multinomial" => Ok(WeightScheme::Multinomial),
            "bayesian" => Ok(WeightScheme::Bayesian),
            other => Err(Error::InvalidArgument(format!("unknown weight scheme {other:?}"))),
        }
    }
}

/// Which inequality a one-sided procedure looks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    /// Evidence that A has higher expected utility than B.
    #[default]
    AOverB,
    /// Evidence that B has higher expected utility than A.
    BOverA,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::AOverB => 1.0,
            Direction::BOverA => -1.0,
        }
    }
}

/// Fills `out` with exchangeable weights for a sample of size `out.len()`.
pub fn draw_weights_into<R: Rng + ?Sized>(scheme: WeightScheme, rng: &mut R, out: &mut [f64]) {
    let n = out.len();
    match scheme {
        WeightScheme::Multinomial => {
            out.fill(0.0);
            for _ in 0..n {
                out[rng.random_range(0..n)] += 1.0;
            }
        }
        WeightScheme::Bayesian => {
            for w in out.iter_mut() {
                *w = Exp1.sample(rng);
            }
        }
    }
}

pub fn draw_weights<R: Rng + ?Sized>(scheme: WeightScheme, n: usize, rng: &mut R) -> Vec<f64> {
    let mut out = vec![0.0; n];
    draw_weights_into(scheme, rng, &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConfig {
    pub scheme: WeightScheme,
    pub reps: usize,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            scheme: WeightScheme::Multinomial,
            reps: 999,
            seed: 0,
            execution: Execution::Parallel,
        }
    }
}

/// `reps x points` matrix of bootstrap process values, replicate-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapDraws {
    reps: usize,
    points: usize,
    values: Vec<f64>,
    pub seed: u64,
    pub scheme: WeightScheme,
}

impl BootstrapDraws {
    /// Wraps an existing matrix, mostly for tests and replays.
    pub fn from_matrix(reps: usize, points: usize, values: Vec<f64>) -> Result<Self> {
        if reps == 0 || points == 0 {
            return Err(Error::InvalidArgument("draw matrix must be nonempty".into()));
        }
        if values.len() != reps * points {
            return Err(Error::LengthMismatch {
                what: "draw matrix",
                expected: reps * points,
                actual: values.len(),
            });
        }
        Ok(Self {
            reps,
            points,
            values,
            seed: 0,
            scheme: WeightScheme::Multinomial,
        })
    }

    pub fn reps(&self) -> usize {
        self.reps
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.points..(r + 1) * self.points]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.points)
    }

    /// All draws at one grid point.
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.rows().map(|row| row[k]).collect()
    }
}

/// One replicate of the centred process for given weight vectors.
pub fn replicate_with_weights(pu: &PairUtilities, weights_a: &[f64], weights_b: &[f64], c: f64) -> Vec<f64> {
    let k = pu.points();
    let mut wa = vec![0.0; k];
    let mut wb = vec![0.0; k];
    let mut out = vec![0.0; k];
    replicate_into(pu, weights_a, weights_b, c, &mut wa, &mut wb, &mut out);
    out
}

fn replicate_into(
    pu: &PairUtilities,
    weights_a: &[f64],
    weights_b: &[f64],
    c: f64,
    wa: &mut [f64],
    wb: &mut [f64],
    out: &mut [f64],
) {
    // P~ f = Wbar * (weighted mean), so each side reduces to
    // Wbar * (weighted mean - plain mean).
    let bar_a = pu.a.weighted_means_into(weights_a, wa);
    let bar_b = pu.b.weighted_means_into(weights_b, wb);
    let scale = (pu.n_a() as f64).sqrt() / c;
    let (ma, mb) = (pu.mean_a(), pu.mean_b());
    for j in 0..out.len() {
        out[j] = scale * (bar_a * (wa[j] - ma[j]) - bar_b * (wb[j] - mb[j]));
    }
}

/// Bootstrap draws for pre-evaluated utilities.
///
/// Replicate `r` uses the substreams `(seed, r, A)` and `(seed, r, B)`, so
/// the matrix does not depend on how replicates are scheduled.
pub fn bootstrap_from_utilities(pu: &PairUtilities, config: &BootstrapConfig) -> Result<BootstrapDraws> {
    if config.reps == 0 {
        return Err(Error::InvalidArgument("bootstrap needs at least one replicate".into()));
    }
    let k = pu.points();
    let c = config.scheme.c();
    let rows = config.execution.map_indices(config.reps, |r| {
        let mut weights_a = vec![0.0; pu.n_a()];
        let mut weights_b = vec![0.0; pu.n_b()];
        draw_weights_into(config.scheme, &mut substream(config.seed, &[r as u64, TAG_A]), &mut weights_a);
        draw_weights_into(config.scheme, &mut substream(config.seed, &[r as u64, TAG_B]), &mut weights_b);
        let mut wa = vec![0.0; k];
        let mut wb = vec![0.0; k];
        let mut out = vec![0.0; k];
        replicate_into(pu, &weights_a, &weights_b, c, &mut wa, &mut wb, &mut out);
        out
    });
    Ok(BootstrapDraws {
        reps: config.reps,
        points: k,
        values: rows.concat(),
        seed: config.seed,
        scheme: config.scheme,
    })
}

pub fn bootstrap_difference_process(
    pair: &SamplePair,
    grid: &UtilityGrid,
    config: &BootstrapConfig,
) -> Result<BootstrapDraws> {
    let pu = PairUtilities::new(pair, grid)?;
    bootstrap_from_utilities(&pu, config)
}

/// 1-based order-statistic index `ceil(q * len)`, clamped to `[1, len]`.
pub fn quantile_index(q: f64, len: usize) -> usize {
    let raw = (q * len as f64 - INDEX_SLACK).ceil();
    (raw.max(1.0) as usize).min(len)
}

/// Sample `q`-quantile as the `ceil(q * len)`-th order statistic of `values`.
///
/// `values` is reordered in place.
pub fn order_stat_quantile(values: &mut [f64], q: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of an empty slice");
    let idx = quantile_index(q, values.len()) - 1;
    let (_, v, _) = values.select_nth_unstable_by(idx, |a, b| a.total_cmp(b));
    *v
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleEstimates {
    /// Scaled interquartile range at each point; zero where degenerate.
    pub sigma: Vec<f64>,
    /// Points whose bootstrap interquartile range is zero.
    pub degenerate: Vec<bool>,
}

impl ScaleEstimates {
    pub fn any_degenerate(&self) -> bool {
        self.degenerate.iter().any(|&d| d)
    }
}

/// `(q_0.75 - q_0.25) / (z_0.75 - z_0.25)` of the draws at each point.
pub fn scale_estimates(draws: &BootstrapDraws) -> Result<ScaleEstimates> {
    if draws.reps() < 4 {
        return Err(Error::InvalidArgument(format!(
            "scale estimates need at least 4 replicates, got {}",
            draws.reps()
        )));
    }
    let (sigma, degenerate) = (0..draws.points())
        .map(|k| {
            let mut col = draws.column(k);
            col.sort_unstable_by(|a, b| a.total_cmp(b));
            let lo = col[quantile_index(0.25, col.len()) - 1];
            let hi = col[quantile_index(0.75, col.len()) - 1];
            let iqr = hi - lo;
            (iqr / NORMAL_IQR, !(iqr > 0.0))
        })
        .unzip();
    Ok(ScaleEstimates { sigma, degenerate })
}

/// Bootstrap t-statistics `G / sigma`, replicate-major.
#[derive(Debug, Clone)]
pub struct Studentized {
    reps: usize,
    points: usize,
    values: Vec<f64>,
}

impl Studentized {
    pub fn new(draws: &BootstrapDraws, sigma_hat: &[f64]) -> Result<Self> {
        if sigma_hat.len() != draws.points() {
            return Err(Error::LengthMismatch {
                what: "scale estimates",
                expected: draws.points(),
                actual: sigma_hat.len(),
            });
        }
        let values = draws
            .rows()
            .flat_map(|row| row.iter().zip(sigma_hat).map(|(g, s)| g / s))
            .collect();
        Ok(Self {
            reps: draws.reps(),
            points: draws.points(),
            values,
        })
    }

    pub fn reps(&self) -> usize {
        self.reps
    }

    pub fn points(&self) -> usize {
        self.points
    }

    fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.points..(r + 1) * self.points]
    }

    /// Per-replicate `(sup, inf, sup |.|)` of `sign * T` over the masked points.
    pub fn extremes(&self, mask: &[bool], sign: f64) -> Result<Vec<(f64, f64, f64)>> {
        if mask.len() != self.points {
            return Err(Error::LengthMismatch {
                what: "subset mask",
                expected: self.points,
                actual: mask.len(),
            });
        }
        if !mask.iter().any(|&m| m) {
            return Err(Error::EmptySubset);
        }
        Ok((0..self.reps)
            .map(|r| {
                self.row(r).iter().zip(mask).filter(|(_, &m)| m).fold(
                    (f64::NEG_INFINITY, f64::INFINITY, 0.0f64),
                    |(hi, lo, ab), (&t, _)| {
                        let t = sign * t;
                        (hi.max(t), lo.min(t), ab.max(t.abs()))
                    },
                )
            })
            .collect())
    }

    /// `(1 - alpha)`-quantile of the per-replicate sup of `sign * T` over the mask.
    pub fn sup_quantile(&self, mask: &[bool], alpha: f64, sign: f64) -> Result<f64> {
        let mut sups: Vec<f64> = self.extremes(mask, sign)?.into_iter().map(|e| e.0).collect();
        Ok(order_stat_quantile(&mut sups, 1.0 - alpha))
    }
}

/// Sup-t critical values over a subset of grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalValues {
    /// `(1 - alpha)`-quantile of the per-replicate sup.
    pub sup_q: f64,
    /// `alpha`-quantile of the per-replicate inf (lower tail).
    pub inf_q: f64,
    /// `(1 - alpha)`-quantile of the per-replicate inf.
    pub inf_upper_q: f64,
    /// `(1 - alpha)`-quantile of the per-replicate sup of absolute values.
    pub abs_q: f64,
    pub alpha: f64,
    pub direction: Direction,
    pub subset_mask: Vec<bool>,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// Critical values from already studentized draws.
pub fn critical_values_studentized(
    t: &Studentized,
    alpha: f64,
    subset_mask: &[bool],
    direction: Direction,
) -> Result<CriticalValues> {
    check_alpha(alpha)?;
    let ext = t.extremes(subset_mask, direction.sign())?;
    let mut sups: Vec<f64> = ext.iter().map(|e| e.0).collect();
    let mut infs: Vec<f64> = ext.iter().map(|e| e.1).collect();
    let mut abss: Vec<f64> = ext.iter().map(|e| e.2).collect();
    Ok(CriticalValues {
        sup_q: order_stat_quantile(&mut sups, 1.0 - alpha),
        inf_q: order_stat_quantile(&mut infs, alpha),
        inf_upper_q: order_stat_quantile(&mut infs, 1.0 - alpha),
        abs_q: order_stat_quantile(&mut abss, 1.0 - alpha),
        alpha,
        direction,
        subset_mask: subset_mask.to_vec(),
    })
}

/// Sup, inf and absolute-sup critical values of `G / sigma_hat` over the
/// points selected by `subset_mask`.
pub fn critical_values(
    draws: &BootstrapDraws,
    sigma_hat: &[f64],
    alpha: f64,
    subset_mask: &[bool],
    direction: Direction,
) -> Result<CriticalValues> {
    let t = Studentized::new(draws, sigma_hat)?;
    critical_values_studentized(&t, alpha, subset_mask, direction)
}
