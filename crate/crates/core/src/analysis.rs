//! Distribution fidelity, multi-run statistics, and chart tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::sim::{all_outcomes, Histogram};

/// Allowed deviation of a distribution's total from 1.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

fn check_normalized(h: &Histogram, name: &str) -> Result<()> {
    let total = h.total_probability();
    if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::Input(format!(
            "{name} distribution sums to {total}, not 1"
        )));
    }
    Ok(())
}

/// Bhattacharyya coefficient `sum_i sqrt(p_i q_i)` over the full outcome
/// space; sampled histograms are converted to frequencies.
pub fn fidelity(theory: &Histogram, experiment: &Histogram) -> Result<f64> {
    if theory.width() != experiment.width() {
        return Err(Error::Input(format!(
            "outcome widths differ: {} vs {}",
            theory.width(),
            experiment.width()
        )));
    }
    check_normalized(theory, "theoretical")?;
    check_normalized(experiment, "experimental")?;
    let f: f64 = all_outcomes(theory.width())
        .map(|o| (theory.probability(&o) * experiment.probability(&o)).sqrt())
        .sum();
    Ok(f.min(1.0))
}

/// Per-outcome mean and sample standard deviation over repeated runs.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub width: usize,
    pub per_outcome_mean: BTreeMap<String, f64>,
    pub per_outcome_stddev: BTreeMap<String, f64>,
    pub num_runs: usize,
    pub shots_per_run: u64,
}

impl RunSummary {
    /// The mean frequencies as an exact distribution.
    pub fn mean_histogram(&self) -> Result<Histogram> {
        Histogram::from_probabilities(
            self.width,
            self.per_outcome_mean.iter().map(|(k, v)| (k.clone(), *v)),
        )
    }

    pub fn mean(&self, outcome: &str) -> f64 {
        self.per_outcome_mean.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn stddev(&self, outcome: &str) -> f64 {
        self.per_outcome_stddev.get(outcome).copied().unwrap_or(0.0)
    }
}

pub fn aggregate_runs(runs: &[Histogram]) -> Result<RunSummary> {
    if runs.len() < 2 {
        return Err(Error::Input(format!(
            "standard deviation needs at least 2 runs, got {}",
            runs.len()
        )));
    }
    let width = runs[0].width();
    let shots = runs[0].total_shots();
    if let Some(r) = runs.iter().find(|r| r.width() != width) {
        return Err(Error::Input(format!(
            "runs disagree on outcome width: {width} vs {}",
            r.width()
        )));
    }
    if let Some(r) = runs.iter().find(|r| r.total_shots() != shots) {
        return Err(Error::Input(format!(
            "runs disagree on shot count: {shots} vs {}",
            r.total_shots()
        )));
    }
    let n = runs.len() as f64;
    let mut per_outcome_mean = BTreeMap::new();
    let mut per_outcome_stddev = BTreeMap::new();
    for o in all_outcomes(width) {
        let freqs: Vec<f64> = runs.iter().map(|r| r.probability(&o)).collect();
        // Shifted by the first run so identical runs give exactly zero spread.
        let shift = freqs[0];
        let mean = shift + freqs.iter().map(|f| f - shift).sum::<f64>() / n;
        let var = freqs.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1.0);
        per_outcome_mean.insert(o.clone(), mean);
        per_outcome_stddev.insert(o, var.sqrt());
    }
    Ok(RunSummary {
        width,
        per_outcome_mean,
        per_outcome_stddev,
        num_runs: runs.len(),
        shots_per_run: shots,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChartRow {
    pub outcome: String,
    pub theory: f64,
    pub exp_mean: f64,
    pub exp_std: f64,
}

/// Theory next to the experimental mean and spread, one row per outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartTable {
    pub rows: Vec<ChartRow>,
}

impl ChartTable {
    pub const HEADER: &'static str = "outcome,theory,exp_mean,exp_std";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.6},{:.6},{:.6}",
                r.outcome, r.theory, r.exp_mean, r.exp_std
            );
        }
        out
    }
}

pub fn export_chart_data(summary: &RunSummary, theory: &Histogram) -> Result<ChartTable> {
    if summary.width != theory.width() {
        return Err(Error::Input(format!(
            "summary covers {} bits but theory covers {}",
            summary.width,
            theory.width()
        )));
    }
    let rows = all_outcomes(summary.width)
        .map(|o| ChartRow {
            theory: theory.probability(&o),
            exp_mean: summary.mean(&o),
            exp_std: summary.stddev(&o),
            outcome: o,
        })
        .collect();
    Ok(ChartTable { rows })
}
