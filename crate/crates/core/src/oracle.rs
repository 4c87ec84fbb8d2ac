//! Independent verification oracles.
//!
//! Everything here recomputes an engine quantity by a deliberately plain
//! route: explicit per-year loops for the valuation expectations and
//! numerical quadrature for option prices. Oracles are used by the test
//! suites and the `oracle` CLI subcommand and must stay independent of the
//! implementation paths they check.

use crate::cohort::PremiumMode;
use crate::market::{norm_cdf, zcb_price, MarketModel};
use crate::valuation::Premium;

/// Probability that a policyholder alive at the valuation date is paid at
/// benefit year `tau` (1-based), by an explicit survival loop.
fn payment_probability(q_tail: &[f64], tau: usize) -> f64 {
    let horizon = q_tail.len();
    let mut alive = 1.0;
    let mut h = 0;
    while h + 1 < tau {
        alive *= 1.0 - q_tail[h];
        h += 1;
    }
    if tau < horizon {
        alive * q_tail[tau - 1]
    } else {
        alive
    }
}

/// Premium rate per unit of sum insured, cashflow by cashflow. Prices the
/// benefit instruments through the Black-Scholes path so that agreement with
/// the engine isolates the probability and discounting logic.
pub fn premium_rate(market: &MarketModel, q1: &[f64], mode: PremiumMode) -> f64 {
    let n = q1.len();
    let mut benefits = 0.0;
    for tau in 1..=n {
        let prob = payment_probability(q1, tau);
        let price = spot_benefit_price(market, 0, tau, market.gbm.u0);
        benefits += prob * price;
    }
    match mode {
        PremiumMode::Single => benefits,
        PremiumMode::Annual => {
            let mut annuity = 0.0;
            for j in 0..n {
                let mut alive = 1.0;
                for &q in &q1[..j] {
                    alive *= 1.0 - q;
                }
                annuity += alive * zcb_price(market.r, j as f64);
            }
            benefits / annuity
        }
    }
}

/// Best-estimate rate per unit sum insured at year `t1`, cashflow by
/// cashflow (same pricing functions, independent expectation loops).
pub fn beta_rate(
    market: &MarketModel,
    q2_tail: &[f64],
    t1: usize,
    n: usize,
    u_t1: f64,
    premium: &Premium,
) -> f64 {
    if t1 == n {
        let spot = u_t1 / market.gbm.u0;
        return spot.max((1.0 + market.i_gar).powi(n as i32));
    }
    let mut benefits = 0.0;
    for tau in 1..=(n - t1) {
        benefits += payment_probability(q2_tail, tau) * spot_benefit_price(market, t1, t1 + tau, u_t1);
    }
    let inflows = match premium.mode {
        PremiumMode::Single => 0.0,
        PremiumMode::Annual => {
            let mut annuity = 0.0;
            for j in 0..(n - t1) {
                let mut alive = 1.0;
                for &q in &q2_tail[..j] {
                    alive *= 1.0 - q;
                }
                annuity += alive * zcb_price(market.r, j as f64);
            }
            premium.rate * annuity
        }
    };
    benefits - inflows
}

fn spot_benefit_price(market: &MarketModel, t: usize, m: usize, u_t: f64) -> f64 {
    // Closed-form puts here; the put itself is checked against quadrature by
    // `put_price_quadrature`.
    crate::market::unit_benefit_price(market, t, m, u_t)
}

const QUADRATURE_PANELS: usize = 20_000;

/// European put by risk-neutral quadrature over the lognormal terminal
/// density, via composite Simpson on the standard normal axis.
///
/// Discounted payoff: e^{-r tau} * E[max(K - S e^{(r - sigma^2/2) tau
/// + sigma sqrt(tau) Z}, 0)]. Absolute accuracy around 1e-10 for the grids
/// used in the tests.
pub fn put_price_quadrature(spot: f64, strike: f64, r: f64, sigma: f64, tau: f64) -> f64 {
    put_price_quadrature_with(spot, strike, r, sigma, tau, QUADRATURE_PANELS)
}

fn put_price_quadrature_with(
    spot: f64,
    strike: f64,
    r: f64,
    sigma: f64,
    tau: f64,
    panels: usize,
) -> f64 {
    assert!(spot > 0.0 && strike > 0.0 && tau >= 0.0 && sigma >= 0.0);
    if tau == 0.0 {
        return (strike - spot).max(0.0);
    }
    if sigma == 0.0 {
        return (strike * (-r * tau).exp() - spot).max(0.0);
    }
    let vol = sigma * tau.sqrt();
    // Payoff is positive only below z_star; below `lo` the normal density
    // has underflowed.
    let z_star = ((strike / spot).ln() - (r - 0.5 * sigma * sigma) * tau) / vol;
    let lo = z_star.min(0.0) - 45.0;
    let hi = z_star;
    let n = panels * 2;
    let h = (hi - lo) / n as f64;
    let integrand = |z: f64| -> f64 {
        let s_t = spot * ((r - 0.5 * sigma * sigma) * tau + vol * z).exp();
        let phi = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
        (strike - s_t).max(0.0) * phi
    };
    let mut acc = integrand(lo) + integrand(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * integrand(lo + i as f64 * h);
    }
    let integral = acc * h / 3.0;
    // Tail below `lo`: payoff there is within rounding of the full strike
    // minus a vanishing spot term; bound it with the normal CDF.
    let tail = (strike - 0.0) * norm_cdf(lo);
    (-r * tau).exp() * (integral + tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::put_price;

    #[test]
    fn quadrature_tracks_closed_form() {
        let p_bs = put_price(1.0, 1.01, 0.02, 0.263258, 1.0);
        let p_q = put_price_quadrature(1.0, 1.01, 0.02, 0.263258, 1.0);
        assert!(
            (p_bs - p_q).abs() < 1e-8,
            "closed form {p_bs} vs quadrature {p_q}"
        );
    }

    #[test]
    fn quadrature_degenerate_cases() {
        assert_eq!(put_price_quadrature(1.0, 1.0, 0.0, 0.0, 1.0), 0.0);
        assert_eq!(put_price_quadrature(0.75, 1.0, 0.05, 0.2, 0.0), 0.25);
    }

    #[test]
    fn payment_probabilities_telescope() {
        let q = [0.1, 0.2, 0.3];
        let total: f64 = (1..=3).map(|tau| payment_probability(&q, tau)).sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert!((payment_probability(&q, 1) - 0.1).abs() < 1e-15);
        assert!((payment_probability(&q, 2) - 0.9 * 0.2).abs() < 1e-15);
        assert!((payment_probability(&q, 3) - 0.9 * 0.8).abs() < 1e-15);
    }
}
