//! Large-sample calibration of the symmetric band on two samples from the
//! same law, where every grid point has zero true difference.

use consensus_core::simulation::{run_row, DesignRow, ExperimentConfig};
use consensus_core::Execution;

#[test]
fn symmetric_band_covers_at_nominal_rate_for_equal_laws() {
    let mut cfg = ExperimentConfig::lognormal_design(500, 999, 77);
    cfg.rows = vec![DesignRow {
        n_a: 500,
        n_b: 500,
        sigma_b: 1.0,
        mu_b: 0.0,
    }];
    let grid = cfg.grid().unwrap();
    let row = run_row(&cfg, 0, &grid, Execution::Parallel).unwrap();
    assert!(row.true_set.is_empty());
    let cp = row.band_cp();
    assert!((cp - 0.90).abs() <= 0.04, "band coverage {cp}");
}
