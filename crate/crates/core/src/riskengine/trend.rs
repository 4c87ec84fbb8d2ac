//! Trend risk: Monte Carlo of the assumption-revision CDR. Each scenario
//! simulates the year's equity and deaths, enriches the mortality data with
//! one simulated calendar year, refits the projection model and reprices the
//! closing best estimate on the revised basis.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::market::gbm_step_factor;
use crate::mortality::{
    enrichment_column, fit_logm, forecast_q2_from, Enrichment, LeeCarterParams, LogMatrix,
    MortalityDataset,
};
use crate::rng::{domain, Streams};
use crate::valuation::beta_rate;

use super::{par_fill, scenario_deaths, CdrDistribution, RiskSetup, ScenarioConfig};

/// Mortality-model inputs of the trend algorithm.
#[derive(Debug, Clone, Copy)]
pub struct TrendInputs<'a> {
    /// Projection model fitted on the data available at the evaluation year.
    pub params: &'a LeeCarterParams,
    /// The training set behind `params`.
    pub data: &'a MortalityDataset,
    pub enrichment: &'a Enrichment,
    /// Cohort age at inception.
    pub cohort_age: u32,
}

/// Trend simulation output.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendResult {
    pub dist: CdrDistribution,
    /// Refit attempts that failed and were resampled.
    pub refit_failures: usize,
}

const MAX_REFIT_ATTEMPTS: u32 = 32;

/// Simulates the trend CDR distribution over (t, t+1].
///
/// Per scenario: equity at t+1, a death roll under the frozen second-order
/// basis, one simulated extra calendar year of population mortality data, a
/// refit, and the CDR as surviving sums times the difference between the
/// revised and the frozen best-estimate rate at the same market prices.
///
/// Failed refits are resampled on a fresh sub-stream; if total failures
/// exceed 0.1% of the scenario count the run aborts.
pub fn simulate_trend(
    config: &ScenarioConfig,
    setup: &RiskSetup<'_>,
    inputs: &TrendInputs<'_>,
) -> Result<TrendResult> {
    debug_assert_eq!(config.t, setup.state.t);
    let t = config.t;
    let t1 = t + 1;
    let h_total = config.n_scenarios;
    let streams = Streams::new(config.seed);

    if inputs.data.exposures().is_none() && inputs.enrichment.synthetic_exposure.is_none() {
        return Err(Error::MissingExposures);
    }

    // Matured cohort: a revision can no longer change any cashflow.
    if t1 >= setup.n {
        return Ok(TrendResult {
            dist: CdrDistribution::from_samples(vec![0.0; h_total]),
            refit_failures: 0,
        });
    }

    let q = setup.q2[t];
    let sums = &setup.state.surviving_sums;
    let base_logm = LogMatrix::from_dataset(inputs.data);
    let remaining = setup.n - t1;
    let revised_age = inputs.cohort_age + t1 as u32;

    let mut packed = vec![(0.0f64, 0u32); h_total];
    par_fill(&mut packed, |h| {
        // Equity and deaths share the idiosyncratic keying so both risks are
        // evaluated on a common scenario set. U_{t+1} is one full-horizon
        // lognormal step from inception.
        let mut eq_rng = streams.stream(&[domain::EQUITY, t as u64, h as u64]);
        let z_norm: f64 = eq_rng.sample(StandardNormal);
        let u_next =
            setup.market.gbm.u0 * gbm_step_factor(&setup.market.gbm, (t + 1) as f64, z_norm);

        let beta_frozen = beta_rate(
            setup.market,
            &setup.q2[t1..setup.n],
            t1,
            setup.n,
            u_next,
            setup.premium,
        );

        let mut death_rng = streams.stream(&[domain::DEATHS, t as u64, h as u64]);
        let (_, alive_sums_t1) = scenario_deaths(sums, q, &mut death_rng);

        let mut failures = 0u32;
        while failures < MAX_REFIT_ATTEMPTS {
            let mut enrich_rng = streams.stream(&[
                domain::ENRICH,
                t as u64,
                h as u64,
                failures as u64,
            ]);
            let revised = enrichment_column(inputs.params, inputs.data, inputs.enrichment, &mut enrich_rng)
                .and_then(|col| {
                    let extended = base_logm.with_extra_column(&col);
                    fit_logm(&extended, inputs.params.age_start, inputs.params.year_start)
                })
                .and_then(|fit| {
                    // Revised diagonal, aligned on calendar years: policy
                    // year j is j steps past the enriched data end.
                    forecast_q2_from(&fit.params, revised_age, remaining, t1)
                });
            match revised {
                Ok(q2_revised) => {
                    let beta_revised = beta_rate(
                        setup.market,
                        &q2_revised,
                        t1,
                        setup.n,
                        u_next,
                        setup.premium,
                    );
                    let cdr = alive_sums_t1 * (beta_revised - beta_frozen);
                    return (cdr, failures);
                }
                Err(_) => failures += 1,
            }
        }
        (f64::NAN, failures)
    });

    let mut samples = Vec::with_capacity(h_total);
    let mut refit_failures = 0usize;
    let mut exhausted = false;
    for (cdr, failures) in packed {
        refit_failures += failures as usize;
        exhausted |= cdr.is_nan();
        samples.push(cdr);
    }
    let cap = (0.001 * h_total as f64).ceil() as usize;
    if exhausted || refit_failures > cap {
        return Err(Error::RefitFailureCap {
            failures: refit_failures,
            cap,
            scenarios: h_total,
        });
    }

    Ok(TrendResult {
        dist: CdrDistribution::from_samples(samples),
        refit_failures,
    })
}
