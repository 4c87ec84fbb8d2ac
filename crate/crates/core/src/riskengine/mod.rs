//! Claims Development Result simulation and capital extraction: Monte Carlo
//! idiosyncratic and trend CDR distributions, the closed-form idiosyncratic
//! variance, SCR at 99.5% VaR, the USP factor and the QIS2 baseline.

mod brute;
mod idios;
mod trend;

pub use brute::{brute_force_idios, ExactDistribution};
pub use idios::{
    idios_cdr_compact, idios_cdr_five_term, idios_variance_closed_form, simulate_idios,
    IdiosResult,
};
pub use trend::{simulate_trend, TrendInputs, TrendResult};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cohort::{CohortState, Cohort};
use crate::error::{Error, Result};
use crate::market::MarketModel;
use crate::mortality::DemographicBasis;
use crate::rng::{domain, Streams};
use crate::stats::{lower_quantile, Moments};
use crate::valuation::Premium;

/// Solvency II one-year tail probability (99.5% VaR).
pub const TAIL_P: f64 = 0.005;

/// How the sum-at-risk rate is driven per scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EtaMode {
    /// Equity over (t, t+1] is simulated; eta varies per scenario.
    Stochastic,
    /// Equity follows the central path; eta is one number (test hook and
    /// closed-form comparisons).
    Deterministic,
}

/// Monte Carlo run configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Evaluation year: the CDR covers (t, t+1].
    pub t: usize,
    /// Number of scenarios H.
    pub n_scenarios: usize,
    pub seed: u64,
    pub eta_mode: EtaMode,
    /// Enables the per-scenario refit of the trend algorithm.
    pub trend: bool,
}

/// Frozen valuation environment at the evaluation year, shared by every
/// scenario.
#[derive(Debug, Clone, Copy)]
pub struct RiskSetup<'a> {
    pub market: &'a MarketModel,
    pub premium: &'a Premium,
    /// Second-order death probabilities for policy years 0..n-1, frozen at t.
    pub q2: &'a [f64],
    /// Policy term.
    pub n: usize,
    /// Equity price at the evaluation year.
    pub u_t: f64,
    /// Cohort state at the evaluation year.
    pub state: &'a CohortState,
}

/// Simulated CDR sample distribution with its first three sample moments.
#[derive(Debug, Clone, PartialEq)]
pub struct CdrDistribution {
    /// Samples in scenario order (sample h belongs to scenario h).
    pub samples: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (n-1).
    pub sd: f64,
    pub skewness: f64,
}

impl CdrDistribution {
    pub fn from_samples(samples: Vec<f64>) -> Self {
        let m = Moments::of(&samples);
        CdrDistribution {
            samples,
            mean: m.mean,
            sd: m.sd,
            skewness: m.skewness,
        }
    }

    /// Lower empirical quantile (infimum form).
    pub fn quantile(&self, p: f64) -> f64 {
        let mut sorted = self.samples.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("CDR samples are finite"));
        lower_quantile(&sorted, p)
    }
}

/// Capital report extracted from a CDR distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScrReport {
    /// SCR = -(empirical p-quantile of the CDR samples).
    pub scr: f64,
    /// Sample standard deviation of the CDR.
    pub sigma: f64,
    /// USP factor SCR / sigma; absent when sigma is zero.
    pub factor: Option<f64>,
    /// Closed-form standard deviation (idiosyncratic runs only).
    pub closed_form_sd: Option<f64>,
    /// QIS2 factor-based SCR (idiosyncratic runs only).
    pub qis2_scr: Option<f64>,
}

/// Extracts the SCR as the negated lower empirical quantile at tail
/// probability `p` (order statistic at rank ceil(p * H)).
///
/// Fewer than ~20 tail samples (H * p < 20) makes the quantile noisy; callers
/// are expected to surface a warning in that case.
pub fn scr_from_samples(dist: &CdrDistribution, p: f64) -> Result<ScrReport> {
    if dist.samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let scr = -dist.quantile(p);
    let sigma = dist.sd;
    let factor = (sigma > 0.0).then(|| scr / sigma);
    Ok(ScrReport {
        scr,
        sigma,
        factor,
        closed_form_sd: None,
        qis2_scr: None,
    })
}

/// QIS2 factor-based idiosyncratic mortality capital:
/// 2.58 * sqrt(q(1-q)/l) * sum-at-risk.
pub fn qis2_scr(q: f64, l: usize, sum_at_risk: f64) -> f64 {
    assert!(q > 0.0 && q < 1.0 && l >= 1);
    2.58 * (q * (1.0 - q) / l as f64).sqrt() * sum_at_risk
}

/// Undertaking-specific multiplier f = SCR / sigma at the standard tail.
pub fn usp_factor(dist: &CdrDistribution) -> Result<f64> {
    if dist.samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    if dist.sd <= 0.0 {
        return Err(Error::ZeroStdDev);
    }
    Ok(-dist.quantile(TAIL_P) / dist.sd)
}

/// Baseline cohort path: simulates deaths year by year from inception to `t`
/// on streams keyed by calendar year, so states at different `t` lie on one
/// consistent history per master seed.
pub fn baseline_state(
    cohort: &Cohort,
    basis: &DemographicBasis,
    t: usize,
    streams: &Streams,
) -> CohortState {
    assert!(t < cohort.n && basis.horizon() >= cohort.n);
    let mut state = CohortState::at_inception(cohort);
    for year in 0..t {
        let mut rng = streams.stream(&[domain::BASELINE_DEATHS, year as u64]);
        let (_, next) = crate::cohort::simulate_deaths(&state, basis.q2[year], &mut rng);
        state = next;
    }
    state
}

/// Chunk size for index-addressed parallel fills. Fixed so that scenario h
/// always lands in the same slot regardless of worker count.
const FILL_CHUNK: usize = 256;

pub(crate) fn par_fill<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    out.par_chunks_mut(FILL_CHUNK)
        .enumerate()
        .for_each(|(ci, chunk)| {
            for (i, slot) in chunk.iter_mut().enumerate() {
                *slot = f(ci * FILL_CHUNK + i);
            }
        });
}

/// Death roll of one scenario over the year: total sums of deaths and of
/// survivors. One uniform per slot, dead slots skipped but still consuming a
/// draw, matching [`crate::cohort::simulate_deaths`] draw for draw.
pub(crate) fn scenario_deaths<R: rand::Rng + ?Sized>(
    sums: &[f64],
    q: f64,
    rng: &mut R,
) -> (f64, f64) {
    let mut death_sums = 0.0;
    let mut alive_sums = 0.0;
    for &s in sums {
        let u: f64 = rng.gen();
        if s > 0.0 {
            if u < q {
                death_sums += s;
            } else {
                alive_sums += s;
            }
        }
    }
    (death_sums, alive_sums)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohort::{death_sums, simulate_deaths};
    use crate::rng::{domain, Streams};

    #[test]
    fn scenario_deaths_matches_cohort_simulation() {
        let sums = vec![1.0, 0.0, 3.0, 2.5, 0.0, 7.0];
        let state = CohortState {
            t: 0,
            surviving_sums: sums.clone(),
            alive_count: 4,
        };
        let streams = Streams::new(5);
        let (z_lean, a_lean) =
            scenario_deaths(&sums, 0.4, &mut streams.stream(&[domain::DEATHS, 1]));
        let (ind, next) = simulate_deaths(&state, 0.4, &mut streams.stream(&[domain::DEATHS, 1]));
        assert_eq!(z_lean, death_sums(&state, &ind));
        assert_eq!(a_lean, next.total_alive_sums());
    }

    #[test]
    fn scr_on_tiny_sample_takes_first_order_statistic() {
        let dist = CdrDistribution::from_samples(vec![-4.0, -1.0, 0.0, 1.0, 2.0]);
        let report = scr_from_samples(&dist, TAIL_P).unwrap();
        assert_eq!(report.scr, 4.0);
    }

    #[test]
    fn scr_of_all_zero_samples_is_zero() {
        let dist = CdrDistribution::from_samples(vec![0.0; 100]);
        let report = scr_from_samples(&dist, TAIL_P).unwrap();
        assert_eq!(report.scr, 0.0);
        assert!(report.factor.is_none());
        assert!(matches!(usp_factor(&dist), Err(Error::ZeroStdDev)));
    }

    #[test]
    fn gaussian_scr_close_to_normal_quantile() {
        use rand_distr::StandardNormal;
        let mut rng = Streams::new(3).stream(&[domain::EQUITY, 42]);
        let samples: Vec<f64> = (0..1_000_000)
            .map(|_| rand::Rng::sample::<f64, _>(&mut rng, StandardNormal))
            .collect();
        let dist = CdrDistribution::from_samples(samples);
        let report = scr_from_samples(&dist, TAIL_P).unwrap();
        let z995 = 2.5758293035489004;
        assert!(
            (report.scr - z995 * dist.sd).abs() < 0.02 * z995 * dist.sd,
            "scr {} vs {}",
            report.scr,
            z995 * dist.sd
        );
        let f = usp_factor(&dist).unwrap();
        assert!((f - z995).abs() < 0.02 * z995);
    }

    #[test]
    fn symmetric_two_point_factor_is_one() {
        let c = 5.0;
        let mut samples = vec![c; 5000];
        samples.extend(vec![-c; 5000]);
        let dist = CdrDistribution::from_samples(samples);
        let f = usp_factor(&dist).unwrap();
        assert!((f - 1.0).abs() < 1e-3, "factor {f}");
    }

    #[test]
    fn qis2_examples() {
        assert!((qis2_scr(0.5, 1, 1.0) - 1.29).abs() < 1e-12);
        assert_eq!(qis2_scr(0.5, 1, 0.0), 0.0);
        let v = qis2_scr(0.0036, 10_000, 1e9);
        let want = 2.58 * (0.0036f64 * 0.9964 / 1e4).sqrt() * 1e9;
        assert!((v - want).abs() < 1e-6);
        assert!((v - 1.545e6).abs() < 1e3, "qis2 {v}");
    }

    #[test]
    fn baseline_state_is_consistent_across_horizons() {
        use crate::cohort::{Cohort, PremiumMode};
        let cohort = Cohort::new(50, 10, vec![1.0; 2000], PremiumMode::Single);
        let q2: Vec<f64> = (0..10).map(|i| 0.01 + 0.001 * i as f64).collect();
        let basis = DemographicBasis {
            q1: q2.clone(),
            q2,
            cohort_age: 50,
            base_year: 2019,
        };
        let streams = Streams::new(9);
        let s3 = baseline_state(&cohort, &basis, 3, &streams);
        let s5 = baseline_state(&cohort, &basis, 5, &streams);
        assert_eq!(s3.t, 3);
        assert_eq!(s5.t, 5);
        // The longer path extends the shorter one: anyone dead by 3 is dead
        // by 5.
        for (a, b) in s3.surviving_sums.iter().zip(&s5.surviving_sums) {
            if *a == 0.0 {
                assert_eq!(*b, 0.0);
            }
        }
        assert!(s5.alive_count <= s3.alive_count);
    }
}
