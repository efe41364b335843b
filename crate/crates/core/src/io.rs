//! Sample ingestion and result files.
//!
//! Sample files hold one number per line. Blank lines and anything after `#`
//! are ignored, and the first remaining line may be a non-numeric header.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::AnalysisResult;
use crate::bootstrap::BootstrapDraws;
use crate::error::{Error, Result};
use crate::simulation::{format_runs, theta_runs, CoverageReport, CoverageRow, ExperimentConfig};

pub fn parse_sample(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    let mut seen_content = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(_) => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("value {line:?} is not finite"),
                })
            }
            // a header is allowed only before the first value
            Err(_) if !seen_content => {}
            Err(_) => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected a number, found {line:?}"),
                })
            }
        }
        seen_content = true;
    }
    Ok(values)
}

pub fn read_sample(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_sample(&text).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

/// One line of the per-point results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub theta: f64,
    pub s: f64,
    pub diff: f64,
    pub sigma_hat: f64,
    pub t0: f64,
    pub b1: f64,
    pub b2: f64,
    pub in_inner: bool,
    pub in_outer: bool,
    pub rejected_iteration: Option<usize>,
}

pub fn result_rows(result: &AnalysisResult) -> Vec<ResultRow> {
    (0..result.grid.len())
        .map(|k| {
            let p = result.grid.point(k);
            ResultRow {
                theta: p.theta,
                s: p.s,
                diff: result.field.diff[k],
                sigma_hat: result.field.sigma_hat[k],
                t0: result.field.t0[k],
                b1: result.band.b1[k],
                b2: result.band.b2[k],
                in_inner: result.sets.inner[k],
                in_outer: result.sets.outer[k],
                rejected_iteration: result.stepdown.iteration[k],
            }
        })
        .collect()
}

pub fn write_results_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results_csv<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

/// Bootstrap draws as `replicate,point_index,value`, 1-based replicates.
pub fn write_draws_csv<W: Write>(draws: &BootstrapDraws, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["replicate", "point_index", "value"])?;
    for (r, row) in draws.rows().enumerate() {
        for (k, v) in row.iter().enumerate() {
            w.write_record(&[(r + 1).to_string(), k.to_string(), v.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn mask_summary(result: &AnalysisResult, mask: &[bool]) -> String {
    let grid = &result.grid;
    let mut out = String::new();
    for (j, s) in grid.s_axis().iter().enumerate() {
        let _ = writeln!(out, "    s = {s}: theta in {}", format_runs(&theta_runs(grid, mask, j)));
    }
    out
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "reject"
    } else {
        "do not reject"
    }
}

/// Plain-text summary of tests, critical values and set boundaries.
pub fn summary_text(result: &AnalysisResult) -> String {
    let s = &result.settings;
    let f = &result.field;
    let cv = &result.critical_values;
    let count = |m: &[bool]| m.iter().filter(|&&x| x).count();
    let mut out = String::new();
    let _ = writeln!(out, "consensus-set analysis");
    let _ = writeln!(out, "  n_a = {}, n_b = {}", f.n_a, f.n_b);
    let _ = writeln!(
        out,
        "  grid: {} theta x {} s = {} points",
        result.grid.theta_axis().len(),
        result.grid.s_axis().len(),
        result.grid.len()
    );
    let _ = writeln!(
        out,
        "  alpha = {}, reps = {}, scheme = {}, seed = {}, mode = {}",
        s.alpha,
        s.reps,
        s.scheme.name(),
        s.seed,
        s.mode.name()
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "critical values (A over B, whole grid)");
    let _ = writeln!(out, "  sup   (1 - alpha): {}", cv.sup_q);
    let _ = writeln!(out, "  inf   (alpha):     {}", cv.inf_q);
    let _ = writeln!(out, "  |sup| (1 - alpha): {}", cv.abs_q);
    let _ = writeln!(out);
    let _ = writeln!(out, "tests");
    let d = &result.dominance;
    let p = result.grid.point(d.argmax);
    let _ = writeln!(
        out,
        "  H0: B dominates A on the grid: {} (sup t0 = {} at theta = {}, s = {}; critical value {}; margin {})",
        yes_no(d.reject),
        d.sup_t0,
        p.theta,
        p.s,
        d.critical_value,
        d.margin
    );
    let n = &result.nondominance;
    let p = result.grid.point(n.argmin);
    let _ = writeln!(
        out,
        "  H0: A does not dominate B on the grid: {} (inf t0 = {} at theta = {}, s = {}; z = {}; margin {})",
        yes_no(n.reject),
        n.inf_t0,
        p.theta,
        p.s,
        n.critical_value,
        n.margin
    );
    let _ = writeln!(
        out,
        "  stepdown rejections of 'A no better than B': {} of {} in {} round(s)",
        result.stepdown.count(),
        result.grid.len(),
        result.stepdown.round_critical_values.len()
    );
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "inner confidence set: {} of {} points",
        count(&result.sets.inner),
        result.grid.len()
    );
    out.push_str(&mask_summary(result, &result.sets.inner));
    let _ = writeln!(
        out,
        "outer confidence set: {} of {} points",
        count(&result.sets.outer),
        result.grid.len()
    );
    out.push_str(&mask_summary(result, &result.sets.outer));
    let _ = writeln!(out);
    let _ = writeln!(out, "diagnostics");
    for (tag, e) in [("A", &result.envelope_a), ("B", &result.envelope_b)] {
        let _ = writeln!(
            out,
            "  sample {tag}: envelope second moment {}, top-1% share {:.3}{}",
            e.moment,
            e.tail_share,
            if e.heavy_tail_warning {
                " WARNING: heavy upper tail, inference may be unreliable"
            } else {
                ""
            }
        );
    }
    if result.scales.any_degenerate() {
        let _ = writeln!(
            out,
            "  WARNING: zero bootstrap interquartile range at {} point(s); scale floored",
            count(&result.scales.degenerate)
        );
    }
    out
}

/// Writes the coverage table header and rows incrementally.
pub struct CoverageCsvWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> CoverageCsvWriter<W> {
    /// Writes the provenance comment block and the column header.
    pub fn new(mut out: W, config: &ExperimentConfig) -> Result<Self> {
        writeln!(out, "# seed={}", config.seed)?;
        writeln!(out, "# sims={}", config.sims)?;
        writeln!(out, "# reps={}", config.reps)?;
        writeln!(out, "# alpha={}", config.alpha)?;
        writeln!(out, "# scheme={}", config.scheme.name())?;
        let mut inner = csv::Writer::from_writer(out);
        inner.write_record([
            "n_a",
            "n_b",
            "sigma_b",
            "mu_b",
            "true_set",
            "band_cp",
            "both_sets_cp",
            "inner_cp",
            "outer_cp",
        ])?;
        inner.flush()?;
        Ok(Self { inner })
    }

    pub fn write_row(&mut self, row: &CoverageRow) -> Result<()> {
        let d = &row.design;
        self.inner.write_record(&[
            d.n_a.to_string(),
            d.n_b.to_string(),
            d.sigma_b.to_string(),
            d.mu_b.to_string(),
            row.true_set.to_string(),
            row.band_cp().to_string(),
            row.both_sets_cp().to_string(),
            row.inner_cp().to_string(),
            row.outer_cp().to_string(),
        ])?;
        self.inner.flush()?;
        Ok(())
    }
}

pub fn write_coverage_csv<W: Write>(report: &CoverageReport, config: &ExperimentConfig, out: W) -> Result<()> {
    let mut w = CoverageCsvWriter::new(out, config)?;
    for row in &report.rows {
        w.write_row(row)?;
    }
    Ok(())
}
