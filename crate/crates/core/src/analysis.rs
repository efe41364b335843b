//! End-to-end inference on two observed samples.

use crate::bootstrap::{
    bootstrap_from_utilities, critical_values_studentized, scale_estimates, BootstrapConfig, BootstrapDraws,
    CriticalValues, Direction, ScaleEstimates, Studentized, WeightScheme,
};
use crate::envelope::{envelope_diagnostic, EnvelopeReport};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::inference::{
    band_at_level, confidence_sets_studentized, mtp_stepdown_studentized, test_dominance_null,
    test_nondominance_null, BandVariant, ConfidenceBand, ConsensusSets, DominanceTest, NonDominanceTest,
    RejectionField, SetMode,
};
use crate::process::{EUDiffField, PairUtilities, SamplePair};
use crate::utility::UtilityGrid;

/// Smallest replicate count accepted for real-data analysis.
pub const MIN_ANALYSIS_REPS: usize = 99;

#[derive(Debug, Clone)]
pub struct AnalysisSettings {
    pub grid: UtilityGrid,
    pub alpha: f64,
    pub scheme: WeightScheme,
    pub reps: usize,
    pub seed: u64,
    pub mode: SetMode,
    pub execution: Execution,
}

impl AnalysisSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 0.5) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie in (0, 0.5], got {}",
                self.alpha
            )));
        }
        if self.reps < MIN_ANALYSIS_REPS {
            return Err(Error::InvalidArgument(format!(
                "at least {MIN_ANALYSIS_REPS} bootstrap replicates are required, got {}",
                self.reps
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct AnalysisResult {
    pub grid: UtilityGrid,
    pub field: EUDiffField,
    pub scales: ScaleEstimates,
    pub draws: BootstrapDraws,
    pub critical_values: CriticalValues,
    pub band: ConfidenceBand,
    pub sets: ConsensusSets,
    /// Stepdown rejections of "A is no better than B".
    pub stepdown: RejectionField,
    pub dominance: DominanceTest,
    pub nondominance: NonDominanceTest,
    pub envelope_a: EnvelopeReport,
    pub envelope_b: EnvelopeReport,
    pub settings: AnalysisSettings,
}

pub fn analyze(pair: &SamplePair, settings: &AnalysisSettings) -> Result<AnalysisResult> {
    settings.validate()?;
    let grid = &settings.grid;
    let pu = PairUtilities::new(pair, grid)?;
    let draws = bootstrap_from_utilities(
        &pu,
        &BootstrapConfig {
            scheme: settings.scheme,
            reps: settings.reps,
            seed: settings.seed,
            execution: settings.execution,
        },
    )?;
    let scales = scale_estimates(&draws)?;
    let field = pu.field(&scales.sigma)?;
    let t = Studentized::new(&draws, &field.sigma_hat)?;
    let full = vec![true; grid.len()];
    let critical_values = critical_values_studentized(&t, settings.alpha, &full, Direction::AOverB)?;
    let band = band_at_level(&field, &t, settings.alpha, BandVariant::Symmetric)?;
    let sets = confidence_sets_studentized(&field, &t, settings.alpha, settings.mode)?;
    let stepdown = mtp_stepdown_studentized(&field, &t, settings.alpha, Direction::AOverB)?;
    let dominance = test_dominance_null(&field, &critical_values)?;
    let nondominance = test_nondominance_null(&field, settings.alpha)?;
    let envelope_a = envelope_diagnostic(grid, pair.sample_a(), 0.0)?;
    let envelope_b = envelope_diagnostic(grid, pair.sample_b(), 0.0)?;
    Ok(AnalysisResult {
        grid: grid.clone(),
        field,
        scales,
        draws,
        critical_values,
        band,
        sets,
        stepdown,
        dominance,
        nondominance,
        envelope_a,
        envelope_b,
        settings: settings.clone(),
    })
}
