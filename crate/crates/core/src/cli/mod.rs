//! Command-line front end: configuration schema and the `fit`, `price`,
//! `scr` and `oracle` commands.

mod commands;

pub use commands::{
    cmd_fit, cmd_oracle, cmd_price, cmd_scr, CheckOutcome, FitArtifacts, PriceArtifacts,
    RiskKind, ScrArtifacts, SummaryRow,
};

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cohort::{PremiumMode, SumsDistribution, SumsSpec};
use crate::error::{Error, Result};
use crate::mortality::DataFormat;
use crate::riskengine::EtaMode;

/// Versioned run configuration. The defaults reproduce the reference case
/// study: 10,000 policyholders aged 50, 10-year term, single premium,
/// lognormal sums (mean 100,000, CoV 2), 20% mortality stress, 2% risk-free
/// rate, 1% guarantee, equity growth 15% with unit CoV at the horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub cohort: CohortConfig,
    pub mortality: MortalityConfig,
    pub market: MarketConfig,
    pub simulation: SimulationConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            version: 1,
            cohort: CohortConfig::default(),
            mortality: MortalityConfig::default(),
            market: MarketConfig::default(),
            simulation: SimulationConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CohortConfig {
    pub age: u32,
    pub size: usize,
    /// Policy term in years.
    pub term: usize,
    pub sums: SumsSpec,
    /// Optional `PolicyId,Sum` CSV replacing sampled sums.
    pub sums_file: Option<PathBuf>,
    pub premium_mode: PremiumMode,
}

impl Default for CohortConfig {
    fn default() -> Self {
        CohortConfig {
            age: 50,
            size: 10_000,
            term: 10,
            sums: SumsSpec {
                mean: 100_000.0,
                cov: 2.0,
                distribution: SumsDistribution::Lognormal,
            },
            sums_file: None,
            premium_mode: PremiumMode::Single,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MortalityConfig {
    pub data_path: PathBuf,
    pub format: DataFormat,
    /// First-order stress multiplier on the second-order probabilities.
    pub stress_factor: f64,
    /// Fitted-model JSON written by `fit`; when present `scr` and `price`
    /// skip the inline fit.
    pub model_path: Option<PathBuf>,
    /// Exposure assumed per age when the data carries none.
    pub synthetic_exposure: Option<f64>,
}

impl Default for MortalityConfig {
    fn default() -> Self {
        MortalityConfig {
            data_path: PathBuf::from("data/italy_synth.csv"),
            format: DataFormat::RatesCsv,
            stress_factor: 1.2,
            model_path: None,
            synthetic_exposure: Some(100_000.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarketConfig {
    /// Per-year expected gross growth of the equity, E[U_t] = u0 * g^t.
    pub mean_growth: f64,
    /// Coefficient-of-variation target of the equity price.
    pub cov_target: f64,
    /// Horizon (years) at which the CoV target is pinned; the policy term
    /// when absent. A GBM cannot hold a constant CoV at every horizon.
    pub cov_horizon: Option<f64>,
    /// Flat risk-free rate, annual compounding.
    pub r: f64,
    /// Minimum guaranteed rate.
    pub i_gar: f64,
    pub u0: f64,
}

impl Default for MarketConfig {
    fn default() -> Self {
        MarketConfig {
            mean_growth: 1.15,
            cov_target: 1.0,
            cov_horizon: None,
            r: 0.02,
            i_gar: 0.01,
            u0: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    /// Evaluation years; each runs a CDR simulation over (t, t+1].
    pub t: Vec<usize>,
    /// Scenario count H.
    pub scenarios: usize,
    pub seed: u64,
    /// Worker threads; 0 means all cores. Results do not depend on it.
    pub workers: usize,
    pub eta_mode: EtaMode,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            t: vec![1, 3, 5, 7],
            scenarios: 100_000,
            seed: 42,
            workers: 0,
            eta_mode: EtaMode::Stochastic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Whether and how to dump the full CDR sample vector.
    pub samples: SampleFormat,
    /// Histogram bins emitted as plot-ready CSV; 0 disables.
    pub histogram_bins: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            samples: SampleFormat::None,
            histogram_bins: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleFormat {
    None,
    Csv,
    /// Raw little-endian f64 array.
    Bin,
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<RunConfig> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        if config.version != 1 {
            return Err(Error::InvalidConfig(format!(
                "unsupported config version {}",
                config.version
            )));
        }
        Ok(config)
    }

    /// Checks invariants and referenced files.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.cohort.size < 1 || self.cohort.term < 1 {
            return fail("cohort size and term must be >= 1".into());
        }
        if !(self.cohort.sums.mean > 0.0) || self.cohort.sums.cov < 0.0 {
            return fail("sums mean must be > 0 and cov >= 0".into());
        }
        if !(self.mortality.stress_factor > 0.0) {
            return fail("stress_factor must be > 0".into());
        }
        if !(self.market.mean_growth > 0.0)
            || self.market.cov_target < 0.0
            || self.market.r <= -1.0
            || self.market.i_gar <= -1.0
            || !(self.market.u0 > 0.0)
        {
            return fail("market parameters out of range".into());
        }
        if let Some(h) = self.market.cov_horizon {
            if !(h > 0.0) {
                return fail("cov_horizon must be > 0".into());
            }
        }
        if self.simulation.scenarios < 1 {
            return fail("scenarios must be >= 1".into());
        }
        for &t in &self.simulation.t {
            if t >= self.cohort.term {
                return fail(format!("evaluation year {t} must be < term {}", self.cohort.term));
            }
        }
        if !self.mortality.data_path.exists() {
            return Err(Error::Io {
                path: self.mortality.data_path.clone(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
            });
        }
        for opt in [&self.mortality.model_path, &self.cohort.sums_file] {
            if let Some(p) = opt {
                if !p.exists() {
                    return Err(Error::Io {
                        path: p.clone(),
                        source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
                    });
                }
            }
        }
        Ok(())
    }

    /// CoV calibration horizon: configured or the policy term.
    pub fn cov_horizon(&self) -> f64 {
        self.market.cov_horizon.unwrap_or(self.cohort.term as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_json() {
        let config = RunConfig::default();
        let text = serde_json::to_string_pretty(&config).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(config, back);
    }

    #[test]
    fn defaults_carry_case_study_values() {
        let c = RunConfig::default();
        assert_eq!(c.cohort.size, 10_000);
        assert_eq!(c.cohort.age, 50);
        assert_eq!(c.cohort.term, 10);
        assert_eq!(c.cohort.sums.mean, 100_000.0);
        assert_eq!(c.cohort.sums.cov, 2.0);
        assert_eq!(c.mortality.stress_factor, 1.2);
        assert_eq!(c.market.r, 0.02);
        assert_eq!(c.market.i_gar, 0.01);
        assert_eq!(c.market.mean_growth, 1.15);
        assert_eq!(c.market.cov_target, 1.0);
        assert_eq!(c.cov_horizon(), 10.0);
    }

    #[test]
    fn partial_config_fills_defaults() {
        let text = r#"{"simulation": {"scenarios": 5000, "seed": 7}}"#;
        let c: RunConfig = serde_json::from_str(text).unwrap();
        assert_eq!(c.simulation.scenarios, 5000);
        assert_eq!(c.simulation.seed, 7);
        assert_eq!(c.cohort.size, 10_000);
    }

    #[test]
    fn t_beyond_term_is_rejected() {
        let mut c = RunConfig::default();
        c.simulation.t = vec![10];
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
    }
}
