//! Financial layer: GBM equity model, Black-Scholes put pricing, zero-coupon
//! discounting and the replicating portfolio for the guaranteed payoff
//! max(U_m / U_0, (1 + i_gar)^m).

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::mortality::DemographicBasis;

/// Geometric Brownian motion parameters, dU = mu U dt + sigma U dW.
///
/// `mu` is the SDE drift, so E[U_t] = u0 * exp(mu * t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbmParams {
    pub mu: f64,
    pub sigma: f64,
    pub u0: f64,
}

/// Market model: equity dynamics plus flat annually-compounded risk-free rate
/// and the contractual minimum guaranteed rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketModel {
    pub gbm: GbmParams,
    /// Flat risk-free rate, annual compounding: a ZCB maturing in tau years
    /// costs (1 + r)^-tau.
    pub r: f64,
    /// Minimum guaranteed rate of the benefit floor (1 + i_gar)^m.
    pub i_gar: f64,
}

impl MarketModel {
    /// Continuously-compounded equivalent of `r`, used inside Black-Scholes
    /// so that its discounting matches the annual ZCB convention.
    pub fn r_continuous(&self) -> f64 {
        (1.0 + self.r).ln()
    }

    /// Guarantee floor (1 + i_gar)^m.
    pub fn guarantee(&self, m: usize) -> f64 {
        (1.0 + self.i_gar).powi(m as i32)
    }
}

/// Replicating portfolio bought at inception: one equity unit per unit of sum
/// insured plus a strip of puts, one maturity per benefit year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HedgingPortfolio {
    /// Total shares of the underlying, equal to the total sums insured.
    pub equity_units: f64,
    /// `put_units[m-1]` is the number of puts with maturity m and strike
    /// (1 + i_gar)^m, for m = 1..=n.
    pub put_units: Vec<f64>,
}

impl HedgingPortfolio {
    /// Fractions of the equity holding protected per maturity; sums to one.
    pub fn unit_fractions(&self) -> Vec<f64> {
        self.put_units.iter().map(|u| u / self.equity_units).collect()
    }
}

/// Solves (mu, sigma) so that E[U_t] = u0 * mean_growth^t for all t and the
/// coefficient of variation of U at `cov_horizon` equals `cov_target`.
pub fn calibrate_gbm(mean_growth: f64, cov_target: f64, cov_horizon: f64, u0: f64) -> GbmParams {
    assert!(mean_growth > 0.0 && cov_target >= 0.0 && cov_horizon > 0.0 && u0 > 0.0);
    // E[U_t] = u0 e^{mu t}; CoV^2(U_t) = e^{sigma^2 t} - 1.
    let mu = mean_growth.ln();
    let sigma = ((1.0 + cov_target * cov_target).ln() / cov_horizon).sqrt();
    GbmParams { mu, sigma, u0 }
}

/// Simulates the equity price at each time in `times` (strictly increasing,
/// starting after 0) by exact lognormal stepping.
pub fn simulate_equity<R: Rng + ?Sized>(params: &GbmParams, times: &[f64], rng: &mut R) -> Vec<f64> {
    let mut path = Vec::with_capacity(times.len());
    let mut t_prev = 0.0;
    let mut u = params.u0;
    for &t in times {
        assert!(t > t_prev, "times must be strictly increasing and positive");
        let dt = t - t_prev;
        u *= gbm_step_factor(params, dt, rng.sample(StandardNormal));
        path.push(u);
        t_prev = t;
    }
    path
}

/// One exact lognormal step of length `dt` given a standard normal draw.
pub fn gbm_step_factor(params: &GbmParams, dt: f64, z: f64) -> f64 {
    ((params.mu - 0.5 * params.sigma * params.sigma) * dt + params.sigma * dt.sqrt() * z).exp()
}

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Black-Scholes European put. `r` is continuously compounded.
///
/// Degenerate limits: at tau = 0 the intrinsic value, at sigma = 0 the
/// forward intrinsic value max(K e^{-r tau} - S, 0).
pub fn put_price(spot: f64, strike: f64, r: f64, sigma: f64, tau: f64) -> f64 {
    debug_assert!(spot > 0.0 && strike > 0.0 && tau >= 0.0 && sigma >= 0.0);
    if tau == 0.0 {
        return (strike - spot).max(0.0);
    }
    let df = (-r * tau).exp();
    if sigma == 0.0 {
        return (strike * df - spot).max(0.0);
    }
    let vol = sigma * tau.sqrt();
    let d1 = ((spot / strike).ln() + (r + 0.5 * sigma * sigma) * tau) / vol;
    let d2 = d1 - vol;
    strike * df * norm_cdf(-d2) - spot * norm_cdf(-d1)
}

/// Black-Scholes European call, same conventions as [`put_price`].
pub fn call_price(spot: f64, strike: f64, r: f64, sigma: f64, tau: f64) -> f64 {
    debug_assert!(spot > 0.0 && strike > 0.0 && tau >= 0.0 && sigma >= 0.0);
    if tau == 0.0 {
        return (spot - strike).max(0.0);
    }
    let df = (-r * tau).exp();
    if sigma == 0.0 {
        return (spot - strike * df).max(0.0);
    }
    let vol = sigma * tau.sqrt();
    let d1 = ((spot / strike).ln() + (r + 0.5 * sigma * sigma) * tau) / vol;
    let d2 = d1 - vol;
    spot * norm_cdf(d1) - strike * df * norm_cdf(d2)
}

/// Zero-coupon bond price, annual compounding.
pub fn zcb_price(r: f64, tau: f64) -> f64 {
    debug_assert!(tau >= 0.0);
    (1.0 + r).powf(-tau)
}

/// Price at time `t`, given equity price `u_t`, of the unit benefit paying
/// max(U_m / U_0, (1 + i_gar)^m) at year `m >= t`.
///
/// Replication: one normalized equity unit plus one put with strike
/// (1 + i_gar)^m. At m = t this is the matured payoff itself.
pub fn unit_benefit_price(model: &MarketModel, t: usize, m: usize, u_t: f64) -> f64 {
    assert!(m >= t && u_t > 0.0);
    let spot = u_t / model.gbm.u0;
    let strike = model.guarantee(m);
    if m == t {
        return spot.max(strike);
    }
    let tau = (m - t) as f64;
    spot + put_price(spot, strike, model.r_continuous(), model.gbm.sigma, tau)
}

/// Builds the inception hedging portfolio for `total_sums` units of sum
/// insured and a policy of `n` years, using the second-order basis.
///
/// Puts at maturity m < n cover expected deaths in (m-1, m]; the final put
/// also covers survivors, so the unit fractions sum to one.
pub fn build_hedging_portfolio(
    total_sums: f64,
    basis: &DemographicBasis,
    n: usize,
) -> HedgingPortfolio {
    assert!(basis.q2.len() >= n && n >= 1);
    let mut put_units = Vec::with_capacity(n);
    let mut survival = 1.0;
    for m in 1..=n {
        let q = basis.q2[m - 1];
        if m < n {
            put_units.push(total_sums * survival * q);
            survival *= 1.0 - q;
        } else {
            // Deaths in the final year plus survivors: everyone still alive.
            put_units.push(total_sums * survival);
        }
    }
    HedgingPortfolio {
        equity_units: total_sums,
        put_units,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mortality::DemographicBasis;
    use crate::rng::{domain, Streams};

    fn table1_model() -> MarketModel {
        MarketModel {
            gbm: calibrate_gbm(1.15, 1.0, 10.0, 1.0),
            r: 0.02,
            i_gar: 0.01,
        }
    }

    #[test]
    fn calibration_matches_moment_targets() {
        let p = calibrate_gbm(1.15, 1.0, 10.0, 1.0);
        assert!((p.mu - 1.15f64.ln()).abs() < 1e-15);
        assert!((p.sigma - (2.0f64.ln() / 10.0).sqrt()).abs() < 1e-15);
        assert!((p.mu - 0.139762).abs() < 1e-6);
        assert!((p.sigma - 0.26328).abs() < 1e-4);
        // Degenerate targets.
        assert_eq!(calibrate_gbm(1.0, 1.0, 10.0, 1.0).mu, 0.0);
        assert_eq!(calibrate_gbm(1.15, 0.0, 10.0, 1.0).sigma, 0.0);
    }

    #[test]
    fn zero_vol_path_is_deterministic() {
        let p = GbmParams {
            mu: 0.05,
            sigma: 0.0,
            u0: 2.0,
        };
        let mut rng = Streams::new(1).stream(&[domain::EQUITY]);
        let path = simulate_equity(&p, &[1.0, 2.0, 5.0], &mut rng);
        for (u, t) in path.iter().zip([1.0, 2.0, 5.0]) {
            assert!((u - 2.0 * (0.05f64 * t).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn fixed_seed_reproduces_path() {
        let p = calibrate_gbm(1.15, 1.0, 10.0, 1.0);
        let times: Vec<f64> = (1..=10).map(|t| t as f64).collect();
        let a = simulate_equity(&p, &times, &mut Streams::new(7).stream(&[domain::EQUITY]));
        let b = simulate_equity(&p, &times, &mut Streams::new(7).stream(&[domain::EQUITY]));
        assert_eq!(a, b);
    }

    #[test]
    fn simulated_mean_matches_growth_target() {
        // E[U_10] = 1.15^10; sample mean over 2*10^5 terminal values.
        let p = calibrate_gbm(1.15, 1.0, 10.0, 1.0);
        let n = 200_000;
        let mut rng = Streams::new(11).stream(&[domain::EQUITY, 99]);
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let u = p.u0 * gbm_step_factor(&p, 10.0, rng.sample(StandardNormal));
            sum += u;
            sumsq += u * u;
        }
        let mean = sum / n as f64;
        let sd = (sumsq / n as f64 - mean * mean).sqrt();
        let target = 1.15f64.powi(10);
        let se = sd / (n as f64).sqrt();
        assert!(
            (mean - target).abs() < 3.0 * se,
            "mean {mean} vs target {target} (se {se})"
        );
    }

    #[test]
    fn discounted_equity_is_a_martingale_in_sample() {
        let p = calibrate_gbm(1.15, 1.0, 10.0, 1.0);
        let n = 200_000;
        let mut rng = Streams::new(13).stream(&[domain::EQUITY, 5]);
        let disc = (-p.mu * 10.0f64).exp();
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let x = disc * p.u0 * gbm_step_factor(&p, 10.0, rng.sample(StandardNormal));
            sum += x;
            sumsq += x * x;
        }
        let mean = sum / n as f64;
        let sd = (sumsq / n as f64 - mean * mean).sqrt();
        let se = sd / (n as f64).sqrt();
        assert!((mean - p.u0).abs() < 3.0 * se);
    }

    #[test]
    fn put_degenerate_cases() {
        assert_eq!(put_price(1.0, 1.0, 0.0, 0.0, 1.0), 0.0);
        // tau = 0: intrinsic.
        assert_eq!(put_price(0.75, 1.0, 0.05, 0.2, 0.0), 0.25);
        // Deep in the money: price -> K e^{-r tau} - S.
        let p = put_price(1e-12, 1.0, 0.02, 0.3, 2.0);
        assert!((p - (1.0 * (-0.04f64).exp() - 1e-12)).abs() < 1e-10);
    }

    #[test]
    fn put_monotone_in_strike_and_vol_with_bounds() {
        let (r, tau) = (0.02, 3.0);
        let mut prev = 0.0;
        for k in [0.5, 0.8, 1.0, 1.2, 1.5] {
            let p = put_price(1.0, k, r, 0.25, tau);
            assert!(p >= prev);
            assert!(p >= (k * (-r * tau as f64).exp() - 1.0).max(0.0));
            assert!(p <= k * (-r * tau as f64).exp());
            prev = p;
        }
        let mut prev = 0.0;
        for s in [0.01, 0.1, 0.25, 0.5, 1.0] {
            let p = put_price(1.0, 1.0, r, s, tau);
            assert!(p >= prev);
            prev = p;
        }
    }

    #[test]
    fn put_call_parity_tight() {
        for s in [0.5, 0.9, 1.0, 1.3, 2.0] {
            for k in [0.7, 1.0, 1.4] {
                for tau in [0.25, 1.0, 7.0] {
                    let (r, sigma) = (0.0198, 0.2633);
                    let c = call_price(s, k, r, sigma, tau);
                    let p = put_price(s, k, r, sigma, tau);
                    let rhs = s - k * (-r * tau as f64).exp();
                    assert!(
                        (c - p - rhs).abs() < 1e-12,
                        "parity violated at s={s} k={k} tau={tau}"
                    );
                }
            }
        }
    }

    #[test]
    fn zcb_examples() {
        assert_eq!(zcb_price(0.02, 0.0), 1.0);
        assert!((zcb_price(0.02, 10.0) - 0.820348).abs() < 1e-6);
        assert_eq!(zcb_price(0.0, 7.0), 1.0);
    }

    #[test]
    fn unit_benefit_matured_payoff() {
        let m = table1_model();
        assert_eq!(unit_benefit_price(&m, 2, 2, 1.3), 1.3);
        let floor = 1.01f64.powi(2);
        assert_eq!(unit_benefit_price(&m, 2, 2, 0.9), floor);
    }

    #[test]
    fn unit_benefit_is_equity_plus_put() {
        let m = table1_model();
        let got = unit_benefit_price(&m, 0, 1, 1.0);
        let want = 1.0 + put_price(1.0, 1.01, m.r_continuous(), m.gbm.sigma, 1.0);
        assert_eq!(got, want);
    }

    fn basis_with_q2(q2: Vec<f64>) -> DemographicBasis {
        let q1 = q2.clone();
        DemographicBasis {
            q2,
            q1,
            cohort_age: 50,
            base_year: 2019,
        }
    }

    #[test]
    fn hedge_single_period_and_no_deaths() {
        let b = basis_with_q2(vec![0.1]);
        let h = build_hedging_portfolio(5.0, &b, 1);
        assert_eq!(h.put_units, vec![5.0]);

        let b = basis_with_q2(vec![0.0; 10]);
        let h = build_hedging_portfolio(3.0, &b, 10);
        assert!(h.put_units[..9].iter().all(|&u| u == 0.0));
        assert_eq!(h.put_units[9], 3.0);
    }

    #[test]
    fn hedge_two_year_fractions() {
        let b = basis_with_q2(vec![0.1, 0.2]);
        let h = build_hedging_portfolio(10.0, &b, 2);
        assert!((h.put_units[0] - 1.0).abs() < 1e-12);
        assert!((h.put_units[1] - 9.0).abs() < 1e-12);
        let total: f64 = h.unit_fractions().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hedge_fractions_sum_to_one() {
        let q2: Vec<f64> = (0..10).map(|t| 0.002 * 1.1f64.powi(t)).collect();
        let h = build_hedging_portfolio(1e9, &basis_with_q2(q2), 10);
        let total: f64 = h.unit_fractions().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
