//! Multiple testing, confidence sets, uniform bands and dominance tests.
//!
//! All procedures compare the zero-centred statistics of an [`EUDiffField`]
//! with sup-t critical values from the same bootstrap draw matrix.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::bootstrap::{critical_values_studentized, BootstrapDraws, CriticalValues, Direction, Studentized};
use crate::error::{Error, Result};
use crate::process::EUDiffField;

/// Outcome of a multiple testing procedure over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectionField {
    pub rejected: Vec<bool>,
    /// Stepdown round in which each point was rejected.
    pub iteration: Vec<Option<usize>>,
    /// Critical value active when the point was rejected, or the last one
    /// computed if it never was.
    pub critical_value: Vec<f64>,
    /// Critical value of every round, in order.
    pub round_critical_values: Vec<f64>,
    pub direction: Direction,
}

impl RejectionField {
    pub fn count(&self) -> usize {
        self.rejected.iter().filter(|&&r| r).count()
    }

    pub fn final_critical_value(&self) -> f64 {
        *self.round_critical_values.last().expect("at least one round")
    }
}

fn check_full(field: &EUDiffField, cv: &CriticalValues) -> Result<()> {
    if cv.subset_mask.len() != field.len() {
        return Err(Error::LengthMismatch {
            what: "critical value subset",
            expected: field.len(),
            actual: cv.subset_mask.len(),
        });
    }
    if !cv.subset_mask.iter().all(|&m| m) {
        return Err(Error::InvalidArgument(
            "critical values must be computed over the whole grid".into(),
        ));
    }
    Ok(())
}

/// Single-step procedure: reject where the oriented t-statistic exceeds the
/// sup-t critical value. Ties are not rejected.
pub fn mtp_basic(field: &EUDiffField, cv: &CriticalValues, direction: Direction) -> Result<RejectionField> {
    check_full(field, cv)?;
    if cv.direction != direction {
        return Err(Error::InvalidArgument(
            "critical values were computed for the other direction".into(),
        ));
    }
    let sign = direction.sign();
    let rejected: Vec<bool> = field.t0.iter().map(|&t| sign * t > cv.sup_q).collect();
    let iteration = rejected.iter().map(|&r| r.then_some(0)).collect();
    Ok(RejectionField {
        rejected,
        iteration,
        critical_value: vec![cv.sup_q; field.len()],
        round_critical_values: vec![cv.sup_q],
        direction,
    })
}

/// Stepdown procedure reusing one studentized draw matrix.
///
/// Each round recomputes the sup-t critical value over the hypotheses not
/// yet rejected; it stops once a round rejects nothing new or nothing is
/// left, which bounds the number of rounds by the grid size.
pub fn mtp_stepdown_studentized(
    field: &EUDiffField,
    t: &Studentized,
    alpha: f64,
    direction: Direction,
) -> Result<RejectionField> {
    if t.points() != field.len() {
        return Err(Error::LengthMismatch {
            what: "bootstrap draws",
            expected: field.len(),
            actual: t.points(),
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let k = field.len();
    let sign = direction.sign();
    let mut active = vec![true; k];
    let mut rejected = vec![false; k];
    let mut iteration = vec![None; k];
    let mut critical_value = vec![f64::NAN; k];
    let mut rounds = Vec::new();

    for round in 0..k.max(1) {
        let cv = t.sup_quantile(&active, alpha, sign)?;
        rounds.push(cv);
        let mut newly = 0;
        for j in 0..k {
            if active[j] && sign * field.t0[j] > cv {
                rejected[j] = true;
                iteration[j] = Some(round);
                critical_value[j] = cv;
                newly += 1;
            }
        }
        if newly == 0 {
            break;
        }
        for j in 0..k {
            active[j] = !rejected[j];
        }
        if !active.iter().any(|&a| a) {
            break;
        }
    }
    let last = *rounds.last().expect("at least one round");
    for (c, r) in critical_value.iter_mut().zip(&rejected) {
        if !r {
            *c = last;
        }
    }
    Ok(RejectionField {
        rejected,
        iteration,
        critical_value,
        round_critical_values: rounds,
        direction,
    })
}

pub fn mtp_stepdown(
    field: &EUDiffField,
    draws: &BootstrapDraws,
    alpha: f64,
    direction: Direction,
) -> Result<RejectionField> {
    let t = Studentized::new(draws, &field.sigma_hat)?;
    mtp_stepdown_studentized(field, &t, alpha, direction)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetMode {
    /// Inner and outer sets from two separate one-sided stepdown procedures.
    OneSided,
    /// Both sets read off one symmetric uniform band.
    #[default]
    BandJoint,
}

impl SetMode {
    pub fn name(self) -> &'static str {
        match self {
            SetMode::OneSided => "one-sided",
            SetMode::BandJoint => "band-joint",
        }
    }
}

impl std::str::FromStr for SetMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-sided" => Ok(SetMode::OneSided),
            "band-joint" => Ok(SetMode::BandJoint),
            other => Err(Error::InvalidArgument(format!("unknown set mode {other:?}"))),
        }
    }
}

/// Inner and outer confidence sets for the consensus set, as grid masks.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusSets {
    pub inner: Vec<bool>,
    pub outer: Vec<bool>,
    pub alpha: f64,
    pub mode: SetMode,
}

pub fn confidence_sets_studentized(
    field: &EUDiffField,
    t: &Studentized,
    alpha: f64,
    mode: SetMode,
) -> Result<ConsensusSets> {
    let (inner, outer) = match mode {
        SetMode::OneSided => {
            let inner = mtp_stepdown_studentized(field, t, alpha, Direction::AOverB)?.rejected;
            let excluded = mtp_stepdown_studentized(field, t, alpha, Direction::BOverA)?.rejected;
            (inner, excluded.iter().map(|&r| !r).collect())
        }
        SetMode::BandJoint => {
            let band = band_at_level(field, t, alpha, BandVariant::Symmetric)?;
            let (inner, outer) = band.sets();
            (inner, outer)
        }
    };
    Ok(ConsensusSets {
        inner,
        outer,
        alpha,
        mode,
    })
}

pub fn confidence_sets(
    field: &EUDiffField,
    draws: &BootstrapDraws,
    alpha: f64,
    mode: SetMode,
) -> Result<ConsensusSets> {
    let t = Studentized::new(draws, &field.sigma_hat)?;
    confidence_sets_studentized(field, &t, alpha, mode)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandVariant {
    Symmetric,
    /// Lower bound only; the upper bound is `+inf`.
    Lower,
    /// Upper bound only; the lower bound is `-inf`.
    Upper,
    /// Two-sided from separate sup and inf quantiles at `alpha / 2` each.
    EqualTailed,
}

/// Lower and upper uniform confidence functions over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceBand {
    pub b1: Vec<f64>,
    pub b2: Vec<f64>,
    pub variant: BandVariant,
    /// Nominal non-coverage of the band.
    pub alpha: f64,
}

impl ConfidenceBand {
    /// `({b1 > 0}, {b2 > 0})`.
    pub fn sets(&self) -> (Vec<bool>, Vec<bool>) {
        (
            self.b1.iter().map(|&b| b > 0.0).collect(),
            self.b2.iter().map(|&b| b > 0.0).collect(),
        )
    }

    /// Whether `b1 <= truth <= b2` at every point.
    pub fn covers(&self, truth: &[f64]) -> bool {
        truth
            .iter()
            .zip(self.b1.iter().zip(&self.b2))
            .all(|(&d, (&lo, &hi))| lo <= d && d <= hi)
    }
}

/// Builds a band from precomputed critical values.
///
/// For [`BandVariant::EqualTailed`] the critical values must have been
/// computed at half the desired level, and the band's `alpha` is twice
/// `cv.alpha`.
pub fn uniform_band(field: &EUDiffField, cv: &CriticalValues, variant: BandVariant) -> Result<ConfidenceBand> {
    check_full(field, cv)?;
    if cv.direction != Direction::AOverB {
        return Err(Error::MissingQuantile("bands oriented as A minus B"));
    }
    let needed = match variant {
        BandVariant::Symmetric => [cv.abs_q, cv.abs_q],
        BandVariant::Lower => [cv.sup_q, cv.sup_q],
        BandVariant::Upper => [cv.inf_q, cv.inf_q],
        BandVariant::EqualTailed => [cv.sup_q, cv.inf_q],
    };
    if needed.iter().any(|q| !q.is_finite()) {
        return Err(Error::MissingQuantile("the requested band variant"));
    }
    let root_n = (field.n_a as f64).sqrt();
    let half = |q: f64, k: usize| q * field.sigma_hat[k] / root_n;
    let k = field.len();
    let (b1, b2): (Vec<f64>, Vec<f64>) = (0..k)
        .map(|j| {
            let d = field.diff[j];
            match variant {
                BandVariant::Symmetric => (d - half(cv.abs_q, j), d + half(cv.abs_q, j)),
                BandVariant::Lower => (d - half(cv.sup_q, j), f64::INFINITY),
                BandVariant::Upper => (f64::NEG_INFINITY, d - half(cv.inf_q, j)),
                BandVariant::EqualTailed => (d - half(cv.sup_q, j), d - half(cv.inf_q, j)),
            }
        })
        .unzip();
    let alpha = match variant {
        BandVariant::EqualTailed => 2.0 * cv.alpha,
        _ => cv.alpha,
    };
    Ok(ConfidenceBand { b1, b2, variant, alpha })
}

/// Uniform `1 - alpha` band, computing the critical values it needs.
pub fn band_at_level(field: &EUDiffField, t: &Studentized, alpha: f64, variant: BandVariant) -> Result<ConfidenceBand> {
    let full = vec![true; field.len()];
    let level = match variant {
        BandVariant::EqualTailed => alpha / 2.0,
        _ => alpha,
    };
    let cv = critical_values_studentized(t, level, &full, Direction::AOverB)?;
    uniform_band(field, &cv, variant)
}

/// Test of the null that B weakly dominates A over the whole grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DominanceTest {
    pub reject: bool,
    pub sup_t0: f64,
    pub argmax: usize,
    pub critical_value: f64,
    /// `sup_t0 - critical_value`.
    pub margin: f64,
}

/// Rejects "B is at least as good as A for every grid utility" when the
/// largest t-statistic exceeds the sup-t critical value.
pub fn test_dominance_null(field: &EUDiffField, cv: &CriticalValues) -> Result<DominanceTest> {
    check_full(field, cv)?;
    if cv.direction != Direction::AOverB {
        return Err(Error::InvalidArgument(
            "dominance test needs critical values oriented as A over B".into(),
        ));
    }
    let (argmax, sup_t0) = field
        .t0
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::EmptySubset)?;
    Ok(DominanceTest {
        reject: sup_t0 > cv.sup_q,
        sup_t0,
        argmax,
        critical_value: cv.sup_q,
        margin: sup_t0 - cv.sup_q,
    })
}

/// Test of the null that A fails to dominate B somewhere on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NonDominanceTest {
    pub reject: bool,
    pub inf_t0: f64,
    pub argmin: usize,
    /// Standard normal `(1 - alpha)`-quantile.
    pub critical_value: f64,
    pub margin: f64,
}

/// Rejects non-dominance when the smallest t-statistic exceeds `z_{1-alpha}`.
pub fn test_nondominance_null(field: &EUDiffField, alpha: f64) -> Result<NonDominanceTest> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let z = Normal::standard().inverse_cdf(1.0 - alpha);
    let (argmin, inf_t0) = field
        .t0
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::EmptySubset)?;
    Ok(NonDominanceTest {
        reject: inf_t0 > z,
        inf_t0,
        argmin,
        critical_value: z,
        margin: inf_t0 - z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bootstrap::{bootstrap_from_utilities, critical_values, BootstrapConfig};
    use crate::process::{PairUtilities, SamplePair};
    use crate::utility::build_grid;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn field_from_t0(t0: &[f64]) -> EUDiffField {
        // sigma = 1, n_a = 1 makes t0 equal to diff
        EUDiffField::new(t0.to_vec(), &vec![1.0; t0.len()], 1, 1).unwrap()
    }

    fn cv_with(sup_q: f64, k: usize) -> CriticalValues {
        CriticalValues {
            sup_q,
            inf_q: -sup_q,
            inf_upper_q: 0.0,
            abs_q: sup_q.abs(),
            alpha: 0.05,
            direction: Direction::AOverB,
            subset_mask: vec![true; k],
        }
    }

    #[test]
    fn basic_mtp_comparisons() {
        let r = mtp_basic(&field_from_t0(&[2.5, 0.3]), &cv_with(1.9, 2), Direction::AOverB).unwrap();
        assert_eq!(r.rejected, vec![true, false]);
        assert_eq!(r.iteration, vec![Some(0), None]);

        let r = mtp_basic(&field_from_t0(&[0.0, 0.0, 0.0]), &cv_with(1.0, 3), Direction::AOverB).unwrap();
        assert_eq!(r.count(), 0);

        let r = mtp_basic(&field_from_t0(&[3.0, 4.0]), &cv_with(1.0, 2), Direction::AOverB).unwrap();
        assert_eq!(r.count(), 2);

        // ties are not rejections
        let r = mtp_basic(&field_from_t0(&[1.0]), &cv_with(1.0, 1), Direction::AOverB).unwrap();
        assert_eq!(r.count(), 0);

        assert!(mtp_basic(&field_from_t0(&[1.0]), &cv_with(1.0, 1), Direction::BOverA).is_err());
        assert!(mtp_basic(&field_from_t0(&[1.0, 2.0]), &cv_with(1.0, 1), Direction::AOverB).is_err());
    }

    /// Brute-force stepdown directly from the definition, for cross-checks.
    fn stepdown_oracle(t0: &[f64], tdraws: &[Vec<f64>], alpha: f64) -> Vec<Option<usize>> {
        let k = t0.len();
        let mut it = vec![None; k];
        for round in 0..k {
            let active: Vec<usize> = (0..k).filter(|&j| it[j].is_none()).collect();
            if active.is_empty() {
                break;
            }
            let mut sups: Vec<f64> = tdraws
                .iter()
                .map(|row| active.iter().map(|&j| row[j]).fold(f64::NEG_INFINITY, f64::max))
                .collect();
            sups.sort_by(|a, b| a.total_cmp(b));
            let r = sups.len();
            let idx = ((1.0 - alpha) * r as f64 - 1e-9).ceil().clamp(1.0, r as f64) as usize;
            let cv = sups[idx - 1];
            let newly: Vec<usize> = active.iter().copied().filter(|&j| t0[j] > cv).collect();
            if newly.is_empty() {
                break;
            }
            for j in newly {
                it[j] = Some(round);
            }
        }
        it
    }

    #[test]
    fn stepdown_two_point_example() {
        // point 1 inflates the sup; once it is removed point 2 clears the bar
        let rows = vec![vec![0.0, 0.1], vec![3.0, 0.2], vec![4.0, 0.5], vec![5.0, 0.3]];
        let draws = BootstrapDraws::from_matrix(4, 2, rows.concat()).unwrap();
        let field = field_from_t0(&[10.0, 1.0]);
        let basic = mtp_basic(
            &field,
            &critical_values(&draws, &field.sigma_hat, 0.25, &[true, true], Direction::AOverB).unwrap(),
            Direction::AOverB,
        )
        .unwrap();
        assert_eq!(basic.rejected, vec![true, false]);
        let sd = mtp_stepdown(&field, &draws, 0.25, Direction::AOverB).unwrap();
        assert_eq!(sd.iteration, vec![Some(0), Some(1)]);
        assert_eq!(sd.round_critical_values, vec![4.0, 0.3]);
        assert_eq!(sd.iteration, stepdown_oracle(&field.t0, &rows, 0.25));
    }

    #[test]
    fn stepdown_stopping_rules() {
        let draws = BootstrapDraws::from_matrix(4, 2, vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8]).unwrap();
        let none = mtp_stepdown(&field_from_t0(&[0.0, 0.0]), &draws, 0.25, Direction::AOverB).unwrap();
        assert_eq!(none.count(), 0);
        assert_eq!(none.round_critical_values.len(), 1);
        let all = mtp_stepdown(&field_from_t0(&[9.0, 9.0]), &draws, 0.25, Direction::AOverB).unwrap();
        assert_eq!(all.count(), 2);
        assert_eq!(all.round_critical_values.len(), 1);
    }

    #[test]
    fn symmetric_band_arithmetic() {
        let field = EUDiffField::new(vec![0.2], &[1.0], 100, 100).unwrap();
        let mut cv = cv_with(1.5, 1);
        cv.abs_q = 2.0;
        let band = uniform_band(&field, &cv, BandVariant::Symmetric).unwrap();
        assert_relative_eq!(band.b1[0], 0.0, epsilon = 1e-15);
        assert_relative_eq!(band.b2[0], 0.4, epsilon = 1e-15);
        let lower = uniform_band(&field, &cv, BandVariant::Lower).unwrap();
        assert_eq!(lower.b2[0], f64::INFINITY);
        assert_relative_eq!(lower.b1[0], 0.05, epsilon = 1e-15);
        let upper = uniform_band(&field, &cv, BandVariant::Upper).unwrap();
        assert_eq!(upper.b1[0], f64::NEG_INFINITY);
        assert_relative_eq!(upper.b2[0], 0.35, epsilon = 1e-15);
        cv.abs_q = f64::NAN;
        assert!(matches!(
            uniform_band(&field, &cv, BandVariant::Symmetric),
            Err(Error::MissingQuantile(_))
        ));
    }

    #[test]
    fn dominance_tests() {
        let t = test_dominance_null(&field_from_t0(&[1.0, 3.1, -2.0]), &cv_with(2.2, 3)).unwrap();
        assert!(t.reject);
        assert_eq!(t.argmax, 1);
        assert_relative_eq!(t.margin, 0.9, epsilon = 1e-12);
        let t = test_dominance_null(&field_from_t0(&[0.0, 0.0]), &cv_with(2.2, 2)).unwrap();
        assert!(!t.reject);

        let n = test_nondominance_null(&field_from_t0(&[1.70, 2.5]), 0.05).unwrap();
        assert!(n.reject);
        assert_relative_eq!(n.critical_value, 1.644_853_626_951_472_2, epsilon = 1e-9);
        assert_eq!(n.argmin, 0);
        assert!(!test_nondominance_null(&field_from_t0(&[0.0, 5.0]), 0.05).unwrap().reject);
    }

    #[test]
    fn identical_samples_give_empty_inner_full_outer() {
        let grid = build_grid(0.0, 3.0, 0.5, -0.1, -0.1, 1.0).unwrap();
        let a = vec![0.5, 1.2, 3.3, 0.7, 2.2, 1.9, 0.3, 4.1];
        let pair = SamplePair::new(a.clone(), a).unwrap();
        let pu = PairUtilities::new(&pair, &grid).unwrap();
        let draws = bootstrap_from_utilities(&pu, &BootstrapConfig { reps: 199, ..Default::default() }).unwrap();
        let sigma = crate::bootstrap::scale_estimates(&draws).unwrap().sigma;
        let field = pu.field(&sigma).unwrap();
        for mode in [SetMode::OneSided, SetMode::BandJoint] {
            let sets = confidence_sets(&field, &draws, 0.1, mode).unwrap();
            assert!(sets.inner.iter().all(|&x| !x), "{mode:?}");
            assert!(sets.outer.iter().all(|&x| x), "{mode:?}");
        }
    }

    fn random_problem() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, u64)> {
        (
            prop::collection::vec(0.05f64..20.0, 8..40),
            prop::collection::vec(0.05f64..20.0, 8..40),
            any::<u64>(),
        )
    }

    fn setup(a: Vec<f64>, b: Vec<f64>, seed: u64) -> (EUDiffField, BootstrapDraws) {
        let grid = build_grid(0.0, 3.0, 0.25, -0.04, 0.0, 0.02).unwrap();
        let pair = SamplePair::new(a, b).unwrap();
        let pu = PairUtilities::new(&pair, &grid).unwrap();
        let cfg = BootstrapConfig {
            reps: 99,
            seed,
            execution: crate::exec::Execution::Sequential,
            ..Default::default()
        };
        let draws = bootstrap_from_utilities(&pu, &cfg).unwrap();
        let sigma = crate::bootstrap::scale_estimates(&draws).unwrap().sigma;
        (pu.field(&sigma).unwrap(), draws)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn stepdown_extends_basic((a, b, seed) in random_problem(), alpha in 0.02f64..0.4) {
            let (field, draws) = setup(a, b, seed);
            let full = vec![true; field.len()];
            for dir in [Direction::AOverB, Direction::BOverA] {
                let cv = critical_values(&draws, &field.sigma_hat, alpha, &full, dir).unwrap();
                let basic = mtp_basic(&field, &cv, dir).unwrap();
                let sd = mtp_stepdown(&field, &draws, alpha, dir).unwrap();
                for j in 0..field.len() {
                    prop_assert!(!basic.rejected[j] || sd.rejected[j]);
                    if let Some(i) = sd.iteration[j] {
                        prop_assert!(dir.sign() * field.t0[j] > sd.round_critical_values[i]);
                    }
                }
                prop_assert_eq!(sd.round_critical_values[0], cv.sup_q);
                for w in sd.round_critical_values.windows(2) {
                    prop_assert!(w[1] <= w[0]);
                }
                // iteration labels are contiguous from zero
                let max_it = sd.iteration.iter().flatten().max().copied();
                if let Some(m) = max_it {
                    for i in 0..=m {
                        prop_assert!(sd.iteration.contains(&Some(i)));
                    }
                }
            }
        }

        #[test]
        fn band_properties((a, b, seed) in random_problem(), a1 in 0.01f64..0.2, gap in 0.01f64..0.2) {
            let (field, draws) = setup(a, b, seed);
            let t = Studentized::new(&draws, &field.sigma_hat).unwrap();
            let wide = band_at_level(&field, &t, a1, BandVariant::Symmetric).unwrap();
            let narrow = band_at_level(&field, &t, a1 + gap, BandVariant::Symmetric).unwrap();
            let tailed = band_at_level(&field, &t, a1, BandVariant::EqualTailed).unwrap();
            for j in 0..field.len() {
                prop_assert!(wide.b1[j] <= narrow.b1[j] && narrow.b2[j] <= wide.b2[j]);
                prop_assert!((0.5 * (wide.b1[j] + wide.b2[j]) - field.diff[j]).abs() <= 1e-10);
                prop_assert!(wide.b1[j] <= wide.b2[j]);
                prop_assert!(tailed.b1[j] <= tailed.b2[j]);
            }
            let (inner, outer) = wide.sets();
            for j in 0..field.len() {
                prop_assert!(!inner[j] || outer[j]);
            }
        }

        #[test]
        fn dominance_test_matches_lower_band((a, b, seed) in random_problem(), alpha in 0.02f64..0.3) {
            let (field, draws) = setup(a, b, seed);
            let full = vec![true; field.len()];
            let cv = critical_values(&draws, &field.sigma_hat, alpha, &full, Direction::AOverB).unwrap();
            let test = test_dominance_null(&field, &cv).unwrap();
            let band = uniform_band(&field, &cv, BandVariant::Lower).unwrap();
            prop_assert_eq!(test.reject, band.b1.iter().any(|&b| b > 0.0));

            let nd = test_nondominance_null(&field, alpha).unwrap();
            if cv.sup_q >= nd.critical_value && nd.inf_t0 > cv.sup_q {
                prop_assert!(nd.reject);
            }
        }

        #[test]
        fn direction_duality((a, b, seed) in random_problem(), alpha in 0.02f64..0.3) {
            let (field, draws) = setup(a.clone(), b.clone(), seed);
            let sets = confidence_sets(&field, &draws, alpha, SetMode::OneSided).unwrap();
            // outer set of the swapped problem, built from the same draws
            let swapped = EUDiffField {
                diff: field.diff.iter().map(|d| -d).collect(),
                t0: field.t0.iter().map(|t| -t).collect(),
                ..field.clone()
            };
            let neg = BootstrapDraws::from_matrix(
                draws.reps(),
                draws.points(),
                draws.rows().flatten().map(|g| -g).collect(),
            ).unwrap();
            let swapped_sets = confidence_sets(&swapped, &neg, alpha, SetMode::OneSided).unwrap();
            for j in 0..field.len() {
                prop_assert_eq!(swapped_sets.outer[j], !sets.inner[j]);
            }
        }
    }
}
