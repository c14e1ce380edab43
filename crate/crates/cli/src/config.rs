//! Experiment configuration: a JSON file and command-line flags, flags win.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    /// d_B(f_n, 1) against ‖f_n − 1‖_∞ on C([0,1])
    StrictFineness,
    /// Bures / quantum-metric ratio on ℂ² as y₁ → 1
    C2Inequivalence,
    /// co-vanishing of all metrics along perturbation families
    Equivalence,
    /// metric axioms and oracle agreement
    Properties,
    /// samples of f_1, f_2, f_3 for plotting
    SequencePlot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Parser, Serialize, Deserialize)]
#[command(name = "qmetric", version, about = "Runs density-space metric experiments")]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    /// JSON file supplying any of the other options
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub experiment: Option<ExperimentName>,

    /// Output path; standard output when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,

    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long)]
    pub trials: Option<u64>,

    #[arg(long)]
    pub nmin: Option<u32>,

    #[arg(long)]
    pub nmax: Option<u32>,

    #[arg(long)]
    pub kmax: Option<u32>,

    /// Grid points for sequence-plot
    #[arg(long)]
    pub grid: Option<usize>,

    /// Overrides every agreement tolerance in the property suite
    #[arg(long)]
    pub tolerance: Option<f64>,
}

impl RawConfig {
    /// Fills unset fields from `base`.
    pub fn or(self, base: RawConfig) -> RawConfig {
        RawConfig {
            config: self.config.or(base.config),
            experiment: self.experiment.or(base.experiment),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            seed: self.seed.or(base.seed),
            trials: self.trials.or(base.trials),
            nmin: self.nmin.or(base.nmin),
            nmax: self.nmax.or(base.nmax),
            kmax: self.kmax.or(base.kmax),
            grid: self.grid.or(base.grid),
            tolerance: self.tolerance.or(base.tolerance),
        }
    }

    pub fn from_json(text: &str) -> Result<RawConfig, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config file: {e}")))
    }
}

/// Fully resolved configuration, written verbatim into every artifact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentName,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub trials: u64,
    pub nmin: u32,
    pub nmax: u32,
    pub kmax: u32,
    pub grid: usize,
    pub tolerance: Option<f64>,
}

impl ExperimentConfig {
    pub fn resolve(raw: RawConfig) -> Result<ExperimentConfig, CliError> {
        let experiment = raw
            .experiment
            .ok_or_else(|| CliError::Usage("no experiment given (use --experiment)".into()))?;
        let default_trials = match experiment {
            ExperimentName::Equivalence => 20,
            _ => 1000,
        };
        let default_format = match experiment {
            ExperimentName::Properties => Format::Json,
            _ => Format::Csv,
        };
        let cfg = ExperimentConfig {
            experiment,
            out: raw.out,
            format: raw.format.unwrap_or(default_format),
            seed: raw.seed.unwrap_or(0),
            trials: raw.trials.unwrap_or(default_trials),
            nmin: raw.nmin.unwrap_or(1),
            nmax: raw.nmax.unwrap_or(100),
            kmax: raw.kmax.unwrap_or(20),
            grid: raw.grid.unwrap_or(1000),
            tolerance: raw.tolerance,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        match self.experiment {
            ExperimentName::StrictFineness => {
                if self.nmin == 0 || self.nmin > self.nmax {
                    return Err(CliError::Usage(format!(
                        "empty n-range {}..={}",
                        self.nmin, self.nmax
                    )));
                }
            }
            ExperimentName::C2Inequivalence => {
                if self.kmax == 0 {
                    return Err(CliError::Usage("kmax must be at least 1".into()));
                }
                if self.kmax > 26 {
                    // 4^{-k} falls below the spacing of doubles near 1
                    return Err(CliError::Usage("kmax must be at most 26".into()));
                }
            }
            ExperimentName::Equivalence | ExperimentName::Properties => {
                if self.trials == 0 {
                    return Err(CliError::Usage("trials must be at least 1".into()));
                }
            }
            ExperimentName::SequencePlot => {
                if self.grid < 2 {
                    return Err(CliError::Usage("grid needs at least 2 points".into()));
                }
            }
        }
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t >= 0.0) {
                return Err(CliError::Usage(format!("invalid tolerance {t}")));
            }
        }
        Ok(())
    }
}
