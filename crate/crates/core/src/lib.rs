//! Inference on the consensus set: the utility functions under which one
//! outcome distribution has higher expected utility than another.
//!
//! The crate evaluates a grid of shifted CRRA utilities on two samples,
//! bootstraps the expected-utility difference process with exchangeable
//! weights, and turns sup-t critical values into multiple tests, inner and
//! outer confidence sets, uniform confidence bands and restricted-dominance
//! tests. A lognormal simulation harness measures coverage against
//! quadrature-computed truth.
//!
//! Bootstrap replicates and simulation draws run on rayon when the
//! `parallel` feature (on by default) is enabled; results are identical
//! either way.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bootstrap;
pub mod envelope;
pub mod error;
pub mod exec;
pub mod inference;
pub mod io;
pub mod plot;
pub mod process;
pub mod quadrature;
pub mod rng;
pub mod simulation;
pub mod utility;

pub use analysis::{analyze, AnalysisResult, AnalysisSettings};
pub use bootstrap::{
    bootstrap_difference_process, critical_values, draw_weights, scale_estimates, BootstrapConfig, BootstrapDraws,
    CriticalValues, Direction, ScaleEstimates, WeightScheme,
};
pub use envelope::{envelope_diagnostic, EnvelopeReport};
pub use error::{Error, Result};
pub use exec::Execution;
pub use inference::{
    confidence_sets, mtp_basic, mtp_stepdown, test_dominance_null, test_nondominance_null, uniform_band,
    BandVariant, ConfidenceBand, ConsensusSets, RejectionField, SetMode,
};
pub use process::{eu_diff_field, expected_utility_mean, EUDiffField, SamplePair};
pub use simulation::{
    run_coverage_experiment, true_consensus_set, true_eu_oracle, CoverageReport, ExperimentConfig, LognormalDGP,
};
pub use utility::{build_grid, eval_utility, UtilityGrid, UtilityParams};
