//! The end-to-end estimation pipeline.

use std::path::PathBuf;

use super::csvio::parse_csv;
use super::report::{emit_plots, emit_report};
use crate::clustering::{sweep, ClusteringConfig, Dataset, Sweep};
use crate::error::{invalid, Result};
use crate::outliers::{density_filter, DensityFilterConfig, FilterOutcome};
use crate::penalty::{estimate, EstimateConfig, EstimationReport, LambdaRule, PenaltyFamily, ScanConfig};
use crate::synth::{generate, SynthSpec};

#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Csv(PathBuf),
    Synth(SynthSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Input,
    /// Sweep range; `None` means `1` and `min(3 K_max, N - 1)`.
    pub k_min: Option<usize>,
    pub k_max: Option<usize>,
    /// Largest assumed K in the additive scan.
    pub k_assumed_max: usize,
    pub family: PenaltyFamily,
    pub multiplicative_family: PenaltyFamily,
    pub lambda_rule: LambdaRule,
    pub filter: Option<DensityFilterConfig>,
    pub output_dir: Option<PathBuf>,
    pub emit_plots: bool,
    pub clustering: ClusteringConfig,
}

impl RunConfig {
    pub fn new(input: Input, k_assumed_max: usize) -> Self {
        Self {
            input,
            k_min: None,
            k_max: None,
            k_assumed_max,
            family: PenaltyFamily::Linear,
            multiplicative_family: PenaltyFamily::Linear,
            lambda_rule: LambdaRule::Approximate,
            filter: None,
            output_dir: None,
            emit_plots: false,
            clustering: ClusteringConfig::default(),
        }
    }

    /// Sweep range for `n` points after filtering.
    pub fn sweep_range(&self, n: usize) -> Result<(usize, usize)> {
        let k_min = self.k_min.unwrap_or(1);
        let k_max = self
            .k_max
            .unwrap_or_else(|| (3 * self.k_assumed_max).min(n.saturating_sub(1)));
        if self.k_assumed_max < 2 {
            return Err(invalid(format!("K_max must be at least 2, got {}", self.k_assumed_max)));
        }
        if k_min > 2 || k_max < self.k_assumed_max + 1 || k_max > n {
            return Err(invalid(format!(
                "sweep {k_min}..={k_max} must start at 1 or 2 and reach K_max + 1 = {} \
                 without exceeding the {n} points",
                self.k_assumed_max + 1
            )));
        }
        Ok((k_min, k_max))
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: EstimationReport,
    pub sweep: Sweep,
    pub filter: Option<FilterOutcome>,
    /// Files written, empty without an output directory.
    pub files: Vec<PathBuf>,
}

pub fn load_input(input: &Input) -> Result<Dataset> {
    match input {
        Input::Csv(path) => parse_csv(path),
        Input::Synth(spec) => Ok(generate(spec)?.0),
    }
}

/// Filter, sweep, scan, multiplicative curve and agreement; then write the
/// report when an output directory is set.
pub fn run_estimate(cfg: &RunConfig) -> Result<RunOutput> {
    let mut data = load_input(&cfg.input)?;
    let filter = match &cfg.filter {
        Some(fc) => {
            let outcome = density_filter(&data, fc)?;
            data = outcome.kept.clone();
            Some(outcome)
        }
        None => None,
    };
    let (k_min, k_max) = cfg.sweep_range(data.len())?;
    let sweep = sweep(&data, k_min, k_max, &cfg.clustering)?;
    let est_cfg = EstimateConfig {
        k_assumed_max: cfg.k_assumed_max,
        scan: ScanConfig {
            family: cfg.family,
            rule: cfg.lambda_rule,
        },
        multiplicative_family: cfg.multiplicative_family,
    };
    let report = estimate(&data, &sweep, &est_cfg)?;
    let mut files = Vec::new();
    if let Some(dir) = &cfg.output_dir {
        files = emit_report(&report, dir)?;
        if cfg.emit_plots {
            files.extend(emit_plots(&report, dir)?);
        }
    }
    Ok(RunOutput {
        report,
        sweep,
        filter,
        files,
    })
}
