//! Idiosyncratic risk: Monte Carlo of the compact one-year CDR
//! (E[Z] - Z) * eta, its closed-form variance, and the five-term
//! balance-sheet formulation used to validate the compact one.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::cohort::CohortState;
use crate::error::Result;
use crate::market::{gbm_step_factor, unit_benefit_price, zcb_price, MarketModel};
use crate::rng::{domain, Streams};
use crate::cohort::PremiumMode;
use crate::valuation::{benefit_masses, beta_rate, eta_rate, survival_to, Premium};

use super::{par_fill, scenario_deaths, CdrDistribution, EtaMode, RiskSetup, ScenarioConfig};

/// Idiosyncratic simulation output.
#[derive(Debug, Clone, PartialEq)]
pub struct IdiosResult {
    pub dist: CdrDistribution,
    /// Mean of eta^2 over the financial scenarios actually used
    /// (deterministic mode: the central eta squared).
    pub eta_sq_mean: f64,
    /// Eta at the central equity step, the deterministic-mode value.
    pub eta_central: f64,
}

/// Sum-at-risk rate at t+1 for an equity price `u_next`.
fn eta_at(setup: &RiskSetup<'_>, t: usize, u_next: f64) -> f64 {
    let t1 = t + 1;
    let beta = beta_rate(
        setup.market,
        &setup.q2[t1..setup.n],
        t1,
        setup.n,
        u_next,
        setup.premium,
    );
    eta_rate(unit_benefit_price(setup.market, t1, t1, u_next), beta)
}

/// Simulates the idiosyncratic CDR distribution over (t, t+1].
///
/// Per scenario: the equity price at t+1, the sum-at-risk rate eta_{t+1},
/// one death roll, and the compact CDR (E[Z] - Z) * eta_{t+1}. Stochastic
/// mode draws U_{t+1} over the full horizon from inception (one exact
/// lognormal step), so the eta distribution reflects everything the market
/// can do by t+1 rather than one conditioning path; deterministic mode uses
/// the central path. Scenario h depends only on (seed, t, h), so the result
/// is invariant to worker count.
pub fn simulate_idios(config: &ScenarioConfig, setup: &RiskSetup<'_>) -> Result<IdiosResult> {
    debug_assert_eq!(config.t, setup.state.t);
    let t = config.t;
    let q = setup.q2[t];
    let sums = &setup.state.surviving_sums;
    let expected_z = q * setup.state.total_alive_sums();
    let streams = Streams::new(config.seed);

    let u_central = setup.market.gbm.u0 * (setup.market.gbm.mu * (t + 1) as f64).exp();
    let eta_central = eta_at(setup, t, u_central);

    let mut samples = vec![0.0f64; config.n_scenarios];
    let eta_sq_mean = match config.eta_mode {
        EtaMode::Deterministic => {
            par_fill(&mut samples, |h| {
                let mut death_rng = streams.stream(&[domain::DEATHS, t as u64, h as u64]);
                let (z, _) = scenario_deaths(sums, q, &mut death_rng);
                (expected_z - z) * eta_central
            });
            eta_central * eta_central
        }
        EtaMode::Stochastic => {
            // One pass per scenario, packing (cdr, eta^2) by index.
            let mut packed = vec![(0.0f64, 0.0f64); config.n_scenarios];
            par_fill(&mut packed, |h| {
                let mut eq_rng = streams.stream(&[domain::EQUITY, t as u64, h as u64]);
                let z_norm: f64 = eq_rng.sample(StandardNormal);
                let u_next = setup.market.gbm.u0
                    * gbm_step_factor(&setup.market.gbm, (t + 1) as f64, z_norm);
                let eta = eta_at(setup, t, u_next);
                let mut death_rng = streams.stream(&[domain::DEATHS, t as u64, h as u64]);
                let (z, _) = scenario_deaths(sums, q, &mut death_rng);
                ((expected_z - z) * eta, eta * eta)
            });
            let mut eta_sq_sum = 0.0;
            for (i, (cdr, e2)) in packed.into_iter().enumerate() {
                samples[i] = cdr;
                eta_sq_sum += e2;
            }
            eta_sq_sum / config.n_scenarios as f64
        }
    };

    Ok(IdiosResult {
        dist: CdrDistribution::from_samples(samples),
        eta_sq_mean,
        eta_central,
    })
}

/// Compact form of the one-year idiosyncratic CDR.
pub fn idios_cdr_compact(expected_death_sums: f64, death_sums: f64, eta: f64) -> f64 {
    (expected_death_sums - death_sums) * eta
}

/// Closed-form conditional variance of the idiosyncratic CDR:
/// l_t * q (1-q) * (second raw moment of alive sums) * E[eta^2].
pub fn idios_variance_closed_form(
    l_t: usize,
    q: f64,
    second_raw_moment: f64,
    eta_sq_mean: f64,
) -> f64 {
    debug_assert!((0.0..1.0).contains(&q));
    l_t as f64 * q * (1.0 - q) * second_raw_moment * eta_sq_mean
}

/// Five-term balance-sheet form of the idiosyncratic CDR: expected benefits
/// and premiums at beginning-of-year expectations, minus realized claims,
/// minus the frozen-basis closing best estimate plus its premium leg.
///
/// Algebraically identical to the compact form; kept as an independent route
/// for the equivalence check.
#[allow(clippy::too_many_arguments)]
pub fn idios_cdr_five_term(
    market: &MarketModel,
    premium: &Premium,
    q2: &[f64],
    n: usize,
    t: usize,
    u_t1: f64,
    state_t: &CohortState,
    death_sums: f64,
    alive_sums_t1: f64,
) -> f64 {
    let t1 = t + 1;
    let a_t = state_t.total_alive_sums();
    let q_tail_t = &q2[t..n];

    // Expected benefit leg of V_{t+1}: beginning-of-year masses priced at t+1.
    let masses_t = benefit_masses(q_tail_t);
    let term1: f64 = a_t
        * masses_t
            .iter()
            .enumerate()
            .map(|(i, m)| m * unit_benefit_price(market, t1, t + i + 1, u_t1))
            .sum::<f64>();

    // Expected premium leg of V_{t+1}: premiums due at t+1..n-1.
    let term2 = match premium.mode {
        PremiumMode::Single => 0.0,
        PremiumMode::Annual => {
            let mut leg = 0.0;
            for tau in 1..=(n - 1 - t) {
                leg += survival_to(q_tail_t, tau) * zcb_price(market.r, tau as f64 - 1.0);
            }
            a_t * premium.rate * leg
        }
    };

    // Realized claims at t+1. In the final year the benefit column is one:
    // every beginning-of-year survivor is paid regardless of death.
    let payoff = unit_benefit_price(market, t1, t1, u_t1);
    let paid_sums = if t1 == n { a_t } else { death_sums };
    let term3 = paid_sums * payoff;

    // Frozen-basis closing best estimate split into its two legs.
    let (term4, term5) = if t1 == n {
        (0.0, 0.0)
    } else {
        let q_tail_t1 = &q2[t1..n];
        let masses_t1 = benefit_masses(q_tail_t1);
        let benefits: f64 = masses_t1
            .iter()
            .enumerate()
            .map(|(i, m)| m * unit_benefit_price(market, t1, t1 + i + 1, u_t1))
            .sum();
        let prem_leg = match premium.mode {
            PremiumMode::Single => 0.0,
            PremiumMode::Annual => {
                premium.rate
                    * (0..q_tail_t1.len())
                        .map(|j| survival_to(q_tail_t1, j) * zcb_price(market.r, j as f64))
                        .sum::<f64>()
            }
        };
        (alive_sums_t1 * benefits, alive_sums_t1 * prem_leg)
    };

    term1 - term2 - term3 - term4 + term5
}
