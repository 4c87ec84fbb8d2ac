//! Market-consistent valuation of the cohort: benefit-payment probabilities,
//! valuation-portfolio unit counts, premium solving on the first-order basis
//! and best-estimate quantities on the second-order basis.
//!
//! Payment convention (endowment): the benefit year tau = 1..n-t pays deaths
//! of (t+tau-1, t+tau] at t+tau, and the final year pays survivors as well,
//! so the per-year payment probabilities sum to one. Premiums are collected
//! at the start of each year from survivors.

use serde::{Deserialize, Serialize};

use crate::cohort::{Cohort, CohortState, PremiumMode};
use crate::error::{Error, Result};
use crate::market::{unit_benefit_price, zcb_price, HedgingPortfolio, MarketModel};
use crate::mortality::DemographicBasis;

/// Which demographic basis a valuation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisOrder {
    /// Stressed pricing basis.
    First,
    /// Best-estimate basis.
    Second,
}

/// Demographic and market information of a valuation date.
#[derive(Debug, Clone, Copy)]
pub struct ValuationBasis<'a> {
    pub demographic: &'a DemographicBasis,
    pub market: &'a MarketModel,
    /// Valuation year.
    pub t: usize,
    /// Equity price at `t`.
    pub u_t: f64,
}

/// Premium rate per unit of sum insured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Premium {
    pub rate: f64,
    pub mode: PremiumMode,
}

/// Probability that a policyholder alive after `years` full years is still
/// alive, given the annual death probabilities from the valuation year on.
pub fn survival_to(q_tail: &[f64], years: usize) -> f64 {
    q_tail[..years].iter().map(|q| 1.0 - q).product()
}

/// Benefit-payment probability per year: entry tau-1 is the probability that
/// a policyholder alive at the valuation date is paid at year tau. Deaths pay
/// in their year; the final year also pays survivors, so the entries sum to
/// one.
pub fn benefit_masses(q_tail: &[f64]) -> Vec<f64> {
    let horizon = q_tail.len();
    assert!(horizon >= 1);
    let mut masses = Vec::with_capacity(horizon);
    let mut survival = 1.0;
    for (j, &q) in q_tail.iter().enumerate() {
        if j + 1 < horizon {
            masses.push(survival * q);
            survival *= 1.0 - q;
        } else {
            masses.push(survival);
        }
    }
    masses
}

/// Expected benefit-entitlement per year from time `t` under the chosen
/// basis, the expectation of the survival/benefit indicator matrix product.
pub fn survival_probs(basis: &DemographicBasis, t: usize, order: BasisOrder) -> Vec<f64> {
    let q = match order {
        BasisOrder::First => &basis.q1,
        BasisOrder::Second => &basis.q2,
    };
    benefit_masses(&q[t..])
}

/// Present value at the valuation date of a unit annuity-due paid at the
/// start of each remaining year while alive.
pub fn premium_annuity(q_tail: &[f64], r: f64) -> f64 {
    (0..q_tail.len())
        .map(|j| survival_to(q_tail, j) * zcb_price(r, j as f64))
        .sum()
}

/// Unit counts of the valuation portfolio at a state: benefit instruments per
/// maturity and premium instruments per payment date.
#[derive(Debug, Clone, PartialEq)]
pub struct VapoUnits {
    /// Entry tau-1: units of the benefit instrument paying at t+tau.
    pub benefit: Vec<f64>,
    /// Entry j: units of the premium instrument collected at t+j
    /// (annual mode). Single mode: one block at issue, empty afterwards.
    pub premium: Vec<f64>,
}

/// Number of replicating-portfolio shares to hold against the cohort state.
pub fn vapo_units(
    state: &CohortState,
    basis: &DemographicBasis,
    order: BasisOrder,
    mode: PremiumMode,
) -> VapoUnits {
    let total = state.total_alive_sums();
    let t = state.t;
    let benefit = survival_probs(basis, t, order)
        .iter()
        .map(|m| total * m)
        .collect();
    let q = match order {
        BasisOrder::First => &basis.q1[t..],
        BasisOrder::Second => &basis.q2[t..],
    };
    let premium = match mode {
        PremiumMode::Single => {
            if t == 0 {
                vec![total]
            } else {
                Vec::new()
            }
        }
        PremiumMode::Annual => (0..q.len()).map(|j| total * survival_to(q, j)).collect(),
    };
    VapoUnits { benefit, premium }
}

/// Consistency view: the inception second-order benefit units equal the
/// hedging portfolio's put strip.
pub fn inception_units_match_hedge(units: &VapoUnits, hedge: &HedgingPortfolio) -> bool {
    units.benefit.len() == hedge.put_units.len()
        && units
            .benefit
            .iter()
            .zip(&hedge.put_units)
            .all(|(a, b)| (a - b).abs() <= 1e-9 * b.abs().max(1.0))
}

/// Solves the premium rate from the protected-VaPo zero condition at issue:
/// the first-order expected value of benefits equals the first-order expected
/// value of premium income, both at market prices.
pub fn solve_premium(
    cohort: &Cohort,
    basis: &DemographicBasis,
    market: &MarketModel,
) -> Result<Premium> {
    assert!(basis.horizon() >= cohort.n);
    let q1 = &basis.q1[..cohort.n];
    let masses = benefit_masses(q1);
    let numerator: f64 = masses
        .iter()
        .enumerate()
        .map(|(i, m)| m * unit_benefit_price(market, 0, i + 1, market.gbm.u0))
        .sum();
    let rate = match cohort.premium_mode {
        PremiumMode::Single => numerator,
        PremiumMode::Annual => {
            let annuity = premium_annuity(q1, market.r);
            if annuity <= 0.0 {
                return Err(Error::ZeroAnnuity);
            }
            numerator / annuity
        }
    };
    Ok(Premium {
        rate,
        mode: cohort.premium_mode,
    })
}

/// Value at issue of the protected VaPo: first-order expected benefits minus
/// first-order expected premium income, per the premium equation. Zero by
/// construction for the solved premium.
pub fn protected_vapo_value(
    cohort: &Cohort,
    basis: &DemographicBasis,
    market: &MarketModel,
    premium: &Premium,
) -> f64 {
    let q1 = &basis.q1[..cohort.n];
    let masses = benefit_masses(q1);
    let benefits: f64 = masses
        .iter()
        .enumerate()
        .map(|(i, m)| m * unit_benefit_price(market, 0, i + 1, market.gbm.u0))
        .sum();
    let income = match premium.mode {
        PremiumMode::Single => premium.rate,
        PremiumMode::Annual => premium.rate * premium_annuity(q1, market.r),
    };
    cohort.total_sums() * (benefits - income)
}

/// Best-estimate rate per unit of sum insured for a policyholder alive at
/// year `t1`, valued with death probabilities `q2_tail` (policy years
/// t1..n-1) and the equity price `u_t1`.
///
/// At `t1 = n` the contract has matured and the rate degenerates to the unit
/// payoff itself.
pub fn beta_rate(
    market: &MarketModel,
    q2_tail: &[f64],
    t1: usize,
    n: usize,
    u_t1: f64,
    premium: &Premium,
) -> f64 {
    if t1 == n {
        return unit_benefit_price(market, n, n, u_t1);
    }
    assert_eq!(q2_tail.len(), n - t1);
    let masses = benefit_masses(q2_tail);
    let benefits: f64 = masses
        .iter()
        .enumerate()
        .map(|(i, m)| m * unit_benefit_price(market, t1, t1 + i + 1, u_t1))
        .sum();
    let inflows = match premium.mode {
        PremiumMode::Single => 0.0,
        PremiumMode::Annual => premium.rate * premium_annuity(q2_tail, market.r),
    };
    benefits - inflows
}

/// Sum-at-risk rate: matured unit payoff minus the frozen-basis
/// best-estimate rate, the exposure multiplier of each accidental death.
pub fn eta_rate(u_out_price: f64, beta: f64) -> f64 {
    u_out_price - beta
}

/// Best estimate of the cohort liability at the state's year.
pub fn best_estimate(
    state: &CohortState,
    vb: &ValuationBasis<'_>,
    n: usize,
    premium: &Premium,
) -> f64 {
    debug_assert_eq!(state.t, vb.t);
    if state.alive_count == 0 || state.t >= n {
        return if state.t >= n && state.alive_count > 0 {
            state.total_alive_sums() * unit_benefit_price(vb.market, n, n, vb.u_t)
        } else {
            0.0
        };
    }
    let q2_tail = &vb.demographic.q2[state.t..n];
    state.total_alive_sums() * beta_rate(vb.market, q2_tail, state.t, n, vb.u_t, premium)
}

/// Frozen-basis best estimate: surviving sums times the per-unit rate.
pub fn r_hat(state: &CohortState, beta: f64) -> f64 {
    state.total_alive_sums() * beta
}
