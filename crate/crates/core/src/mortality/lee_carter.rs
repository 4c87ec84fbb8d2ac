//! Lee-Carter model: log m_{x,t} = a_x + b_x k_t with a random-walk-with-drift
//! period index. Fitting extracts the dominant singular triplet of the
//! centered log-rate matrix and renormalizes to sum(b) = 1, sum(k) = 0.

use rand::Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mortality::dataset::{MortalityDataset, RATE_FLOOR};
use crate::rng::splitmix64;

/// Fitted Lee-Carter parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeeCarterParams {
    /// First age of the fitted range; `a[i]`, `b[i]` belong to age_start + i.
    pub age_start: u32,
    /// First calendar year; `k[j]` belongs to year_start + j.
    pub year_start: i32,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub k: Vec<f64>,
    /// Random-walk drift of k.
    pub drift: f64,
    /// Standard deviation of the random-walk innovations, >= 0.
    pub sigma_k: f64,
}

impl LeeCarterParams {
    pub fn n_ages(&self) -> usize {
        self.a.len()
    }

    pub fn n_years(&self) -> usize {
        self.k.len()
    }

    pub fn last_age(&self) -> u32 {
        self.age_start + self.a.len() as u32 - 1
    }

    pub fn last_year(&self) -> i32 {
        self.year_start + self.k.len() as i32 - 1
    }

    pub fn age_index(&self, age: u32) -> Option<usize> {
        (age >= self.age_start && age <= self.last_age()).then(|| (age - self.age_start) as usize)
    }

    /// Central period index `s` steps ahead of the last fitted year
    /// (s = 0 is the last fitted value).
    pub fn k_ahead(&self, s: usize) -> f64 {
        self.k[self.k.len() - 1] + s as f64 * self.drift
    }
}

/// Fit result: parameters plus diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct FitOutcome {
    pub params: LeeCarterParams,
    /// Share of squared Frobenius norm captured by the first singular value.
    pub explained_variance: f64,
    pub iterations: usize,
}

/// Log-rate matrix in fitting layout (rows = ages, columns = years).
#[derive(Debug, Clone)]
pub(crate) struct LogMatrix {
    pub n_ages: usize,
    pub n_years: usize,
    /// Row-major, n_ages x n_years.
    pub data: Vec<f64>,
}

impl LogMatrix {
    pub fn from_dataset(data: &MortalityDataset) -> LogMatrix {
        LogMatrix {
            n_ages: data.n_ages(),
            n_years: data.n_years(),
            data: data.rates().iter().map(|&m| m.ln()).collect(),
        }
    }

    /// Copy of `self` with one extra year column appended.
    pub fn with_extra_column(&self, col: &[f64]) -> LogMatrix {
        assert_eq!(col.len(), self.n_ages);
        let ny = self.n_years + 1;
        let mut data = Vec::with_capacity(self.n_ages * ny);
        for (i, &c) in col.iter().enumerate() {
            data.extend_from_slice(&self.data[i * self.n_years..(i + 1) * self.n_years]);
            data.push(c);
        }
        LogMatrix {
            n_ages: self.n_ages,
            n_years: ny,
            data,
        }
    }
}

/// Fits the Lee-Carter model by the classical SVD route.
pub fn fit_lee_carter(data: &MortalityDataset) -> Result<FitOutcome> {
    if data.n_years() < 2 || data.n_ages() < 2 {
        return Err(Error::TooSmallToFit {
            years: data.n_years(),
            ages: data.n_ages(),
        });
    }
    let logm = LogMatrix::from_dataset(data);
    fit_logm(&logm, data.ages[0], data.years[0])
}

const MAX_POWER_ITERATIONS: usize = 2000;

pub(crate) fn fit_logm(logm: &LogMatrix, age_start: u32, year_start: i32) -> Result<FitOutcome> {
    let (na, ny) = (logm.n_ages, logm.n_years);
    if !logm.data.iter().all(|v| v.is_finite()) {
        let idx = logm.data.iter().position(|v| !v.is_finite()).unwrap();
        return Err(Error::NonFiniteLog {
            age: age_start + (idx / ny) as u32,
            year: year_start + (idx % ny) as i32,
        });
    }

    // a_x: row means; C: centered matrix.
    let mut a = vec![0.0; na];
    let mut c = vec![0.0; na * ny];
    for i in 0..na {
        let row = &logm.data[i * ny..(i + 1) * ny];
        let mean = row.iter().sum::<f64>() / ny as f64;
        a[i] = mean;
        for (j, &v) in row.iter().enumerate() {
            c[i * ny + j] = v - mean;
        }
    }

    let frob2: f64 = c.iter().map(|v| v * v).sum();
    let scale: f64 = logm.data.iter().map(|v| v * v).sum::<f64>().sqrt();
    if frob2.sqrt() <= 1e-12 * (1.0 + scale) {
        return Err(Error::NoPeriodVariation);
    }

    let (u, s, v, iterations) = dominant_triplet(&c, na, ny)?;

    let sum_u: f64 = u.iter().sum();
    if sum_u.abs() < 1e-12 {
        return Err(Error::NoPeriodVariation);
    }
    let b: Vec<f64> = u.iter().map(|x| x / sum_u).collect();
    let mut k: Vec<f64> = v.iter().map(|x| x * s * sum_u).collect();
    // Rows of C are centered, so sum(k) is already ~0; pin it exactly.
    let k_mean = k.iter().sum::<f64>() / ny as f64;
    for x in k.iter_mut() {
        *x -= k_mean;
    }

    let drift = (k[ny - 1] - k[0]) / (ny as f64 - 1.0);
    let sigma_k = if ny >= 3 {
        let resid2: f64 = k
            .windows(2)
            .map(|w| {
                let e = (w[1] - w[0]) - drift;
                e * e
            })
            .sum();
        (resid2 / (ny as f64 - 2.0)).sqrt()
    } else {
        0.0
    };

    Ok(FitOutcome {
        params: LeeCarterParams {
            age_start,
            year_start,
            a,
            b,
            k,
            drift,
            sigma_k,
        },
        explained_variance: (s * s) / frob2,
        iterations,
    })
}

/// Dominant singular triplet of a row-major matrix by alternating power
/// iteration. Deterministic: the start vector is fixed.
fn dominant_triplet(c: &[f64], na: usize, ny: usize) -> Result<(Vec<f64>, f64, Vec<f64>, usize)> {
    let mut seed = 0x5EED_u64;
    let mut v: Vec<f64> = (0..ny)
        .map(|_| (splitmix64(&mut seed) >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
        .collect();
    normalize(&mut v);
    let mut u = vec![0.0; na];
    let mut v_next = vec![0.0; ny];
    let mut s = 0.0;
    let mut s_prev = f64::NEG_INFINITY;
    let mut iterations = 0;
    for iter in 1..=MAX_POWER_ITERATIONS {
        iterations = iter;
        // u <- C v, normalized.
        for i in 0..na {
            let row = &c[i * ny..(i + 1) * ny];
            u[i] = row.iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        let nu = normalize(&mut u);
        if nu == 0.0 {
            // v landed in the null space; perturb deterministically.
            for x in v.iter_mut() {
                *x += (splitmix64(&mut seed) >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            }
            normalize(&mut v);
            continue;
        }
        // v <- C^T u, normalized; the norm is the singular value estimate.
        v_next.iter_mut().for_each(|x| *x = 0.0);
        for i in 0..na {
            let row = &c[i * ny..(i + 1) * ny];
            let ui = u[i];
            for (x, &cij) in v_next.iter_mut().zip(row) {
                *x += ui * cij;
            }
        }
        s = normalize(&mut v_next);
        let dv: f64 = v
            .iter()
            .zip(&v_next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut v, &mut v_next);
        if (s - s_prev).abs() <= 1e-13 * s.max(f64::MIN_POSITIVE) && dv <= 1e-12 {
            return Ok((u, s, v, iterations));
        }
        s_prev = s;
    }
    // Accept a slightly looser vector tolerance before giving up.
    if (s - s_prev).abs() <= 1e-9 * s {
        return Ok((u, s, v, iterations));
    }
    Err(Error::FitNotConverged(MAX_POWER_ITERATIONS))
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    norm
}

/// Death probability from a central rate under constant force within the
/// year: q = 1 - exp(-m), kept strictly inside (0, 1).
pub fn q_from_rate(m: f64) -> f64 {
    (-(-m).exp_m1()).clamp(1e-12, 1.0 - 1e-9)
}

/// Central rate from a death probability, the exact inverse of
/// [`q_from_rate`] before clamping: m = -ln(1 - q).
pub fn rate_from_q(q: f64) -> f64 {
    (-(-q).ln_1p()).max(RATE_FLOOR)
}

fn check_age_range(params: &LeeCarterParams, age: u32, horizon: usize) -> Result<()> {
    if horizon == 0 {
        return Err(Error::InvalidConfig("forecast horizon must be >= 1".into()));
    }
    let last = age + horizon as u32 - 1;
    if params.age_index(age).is_none() || params.age_index(last).is_none() {
        return Err(Error::AgeOutOfRange {
            age,
            last,
            min: params.age_start,
            max: params.last_age(),
        });
    }
    Ok(())
}

/// Central cohort forecast of annual death probabilities: entry t is
/// q_{age+t} for the year that is t+1 steps past the last fitted year.
pub fn forecast_q2(params: &LeeCarterParams, age: u32, horizon: usize) -> Result<Vec<f64>> {
    forecast_q2_from(params, age, horizon, 1)
}

/// Central cohort forecast whose first entry sits `steps_ahead` past the last
/// fitted year (steps_ahead = 1 is the ordinary one-year-ahead start). Used
/// to keep a re-fitted basis aligned on calendar time after enrichment.
pub fn forecast_q2_from(
    params: &LeeCarterParams,
    age: u32,
    horizon: usize,
    steps_ahead: usize,
) -> Result<Vec<f64>> {
    check_age_range(params, age, horizon)?;
    let base = params.age_index(age).unwrap();
    Ok((0..horizon)
        .map(|t| {
            let m = (params.a[base + t] + params.b[base + t] * params.k_ahead(steps_ahead + t)).exp();
            q_from_rate(m)
        })
        .collect())
}

/// Stochastic cohort forecast: the period index follows the fitted random
/// walk with drift, accumulating Normal(0, sigma_k) innovations.
pub fn forecast_q2_stochastic<R: Rng + ?Sized>(
    params: &LeeCarterParams,
    age: u32,
    horizon: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_age_range(params, age, horizon)?;
    let base = params.age_index(age).unwrap();
    let mut k = params.k[params.k.len() - 1];
    Ok((0..horizon)
        .map(|t| {
            let z: f64 = rng.sample(StandardNormal);
            k += params.drift + params.sigma_k * z;
            let m = (params.a[base + t] + params.b[base + t] * k).exp();
            q_from_rate(m)
        })
        .collect())
}

/// How enrichment draws the simulated death counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeathDraw {
    /// Binomial(round(exposure), q), the production mode.
    Binomial,
    /// Deaths forced to their expectation exposure * q (test hook).
    Expectation,
    /// Expectation scaled by a factor (test hook).
    ScaledExpectation(f64),
}

/// Enrichment configuration for the trend algorithm's refit step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Enrichment {
    /// Exposure used for ages without (positive) observed exposure.
    /// `None` means observed exposures are required.
    pub synthetic_exposure: Option<f64>,
    pub draw: DeathDraw,
}

impl Default for Enrichment {
    fn default() -> Self {
        Enrichment {
            synthetic_exposure: Some(100_000.0),
            draw: DeathDraw::Binomial,
        }
    }
}

/// Simulates one additional calendar year of mortality data under the fitted
/// model's own one-year-ahead central forecast, appends the implied rate
/// column and refits.
pub fn enrich_and_refit<R: Rng + ?Sized>(
    params: &LeeCarterParams,
    data: &MortalityDataset,
    enrichment: &Enrichment,
    rng: &mut R,
) -> Result<LeeCarterParams> {
    let logm = LogMatrix::from_dataset(data);
    let col = enrichment_column(params, data, enrichment, rng)?;
    let extended = logm.with_extra_column(&col);
    Ok(fit_logm(&extended, params.age_start, params.year_start)?.params)
}

/// The appended log-rate column for one simulated year.
pub(crate) fn enrichment_column<R: Rng + ?Sized>(
    params: &LeeCarterParams,
    data: &MortalityDataset,
    enrichment: &Enrichment,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let na = data.n_ages();
    let mut col = Vec::with_capacity(na);
    for ai in 0..na {
        let exposure = match data.latest_exposure(ai) {
            Some(e) => e,
            None => enrichment
                .synthetic_exposure
                .ok_or(Error::MissingExposures)?,
        };
        // One-year-ahead central forecast at this age.
        let q = q_from_rate((params.a[ai] + params.b[ai] * params.k_ahead(1)).exp());
        let observed_q = match enrichment.draw {
            DeathDraw::Binomial => {
                let trials = exposure.round().max(1.0) as u64;
                let d = Binomial::new(trials, q)
                    .expect("q in (0,1)")
                    .sample(rng) as f64;
                d / trials as f64
            }
            DeathDraw::Expectation => q,
            DeathDraw::ScaledExpectation(f) => (f * q).min(1.0),
        };
        col.push(rate_from_q(observed_q.clamp(0.0, 1.0 - 1e-9)).ln());
    }
    Ok(col)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{domain, Streams};

    /// Noiseless synthetic dataset log m = a_x + b_x k_t with sum(b) = 1 and
    /// sum(k) = 0.
    fn synthetic(
        a: &[f64],
        b: &[f64],
        k: &[f64],
        age_start: u32,
        year_start: i32,
    ) -> MortalityDataset {
        let rates: Vec<f64> = a
            .iter()
            .zip(b)
            .flat_map(|(&ai, &bi)| k.iter().map(move |&kt| (ai + bi * kt).exp()))
            .collect();
        let years: Vec<i32> = (0..k.len() as i32).map(|j| year_start + j).collect();
        let ages: Vec<u32> = (0..a.len() as u32).map(|i| age_start + i).collect();
        MortalityDataset::new(years, ages, rates).unwrap()
    }

    fn example_abk() -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let a = vec![-6.0, -5.6, -5.2, -4.8, -4.4];
        let b = vec![0.30, 0.25, 0.20, 0.15, 0.10];
        let mut k: Vec<f64> = (0..12).map(|t| 8.0 - 1.6 * t as f64 + (t % 3) as f64).collect();
        let mean = k.iter().sum::<f64>() / k.len() as f64;
        k.iter_mut().for_each(|x| *x -= mean);
        (a, b, k)
    }

    #[test]
    fn round_trip_recovers_parameters() {
        let (a, b, k) = example_abk();
        let data = synthetic(&a, &b, &k, 50, 2000);
        let fit = fit_lee_carter(&data).unwrap();
        let p = &fit.params;
        let rmse = |x: &[f64], y: &[f64]| {
            (x.iter()
                .zip(y)
                .map(|(u, v)| (u - v) * (u - v))
                .sum::<f64>()
                / x.len() as f64)
                .sqrt()
        };
        assert!(rmse(&p.a, &a) < 1e-8, "a rmse {}", rmse(&p.a, &a));
        assert!(rmse(&p.b, &b) < 1e-8, "b rmse {}", rmse(&p.b, &b));
        assert!(rmse(&p.k, &k) < 1e-8, "k rmse {}", rmse(&p.k, &k));
        assert!((fit.explained_variance - 1.0).abs() < 1e-9);
    }

    #[test]
    fn identifiability_constraints_hold() {
        let (a, b, k) = example_abk();
        let data = synthetic(&a, &b, &k, 50, 2000);
        let p = fit_lee_carter(&data).unwrap().params;
        let sum_b: f64 = p.b.iter().sum();
        let sum_k: f64 = p.k.iter().sum();
        let k_norm = p.k.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((sum_b - 1.0).abs() < 1e-10);
        assert!(sum_k.abs() < 1e-8 * k_norm.max(1.0));
        for (i, &ai) in p.a.iter().enumerate() {
            for &kt in &p.k {
                assert!((ai + p.b[i] * kt).is_finite());
            }
        }
    }

    #[test]
    fn two_by_two_hand_factorization() {
        // rates {{e^-4, e^-5}, {e^-4, e^-5}}: a = (-4.5, -4.5), b = (0.5, 0.5),
        // k = (1, -1).
        let rates = vec![
            (-4.0f64).exp(),
            (-5.0f64).exp(),
            (-4.0f64).exp(),
            (-5.0f64).exp(),
        ];
        let data = MortalityDataset::new(vec![2000, 2001], vec![50, 51], rates).unwrap();
        let p = fit_lee_carter(&data).unwrap().params;
        assert!((p.a[0] + 4.5).abs() < 1e-12 && (p.a[1] + 4.5).abs() < 1e-12);
        assert!((p.b[0] - 0.5).abs() < 1e-10 && (p.b[1] - 0.5).abs() < 1e-10);
        assert!((p.k[0] - 1.0).abs() < 1e-10 && (p.k[1] + 1.0).abs() < 1e-10);
    }

    #[test]
    fn constant_in_time_is_degenerate() {
        let data = synthetic(&[-4.0, -3.0, -2.0], &[0.4, 0.3, 0.3], &[0.0, 0.0, 0.0], 50, 2000);
        assert!(matches!(
            fit_lee_carter(&data).unwrap_err(),
            Error::NoPeriodVariation
        ));
    }

    #[test]
    fn frozen_period_index_forecast() {
        // drift = 0, sigma_k = 0: forecast equals the fitted q at the last k.
        let (a, b, _) = example_abk();
        let k = vec![2.0, -2.0, 0.0, 2.0, -2.0, 0.0];
        let data = synthetic(&a, &b, &k, 50, 2000);
        let mut p = fit_lee_carter(&data).unwrap().params;
        p.drift = 0.0;
        p.sigma_k = 0.0;
        let q = forecast_q2(&p, 50, 5).unwrap();
        let k_last = p.k[p.k.len() - 1];
        for (t, &qt) in q.iter().enumerate() {
            let expect = q_from_rate((p.a[t] + p.b[t] * k_last).exp());
            assert!((qt - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_b_forecast_ignores_k() {
        let p = LeeCarterParams {
            age_start: 50,
            year_start: 2000,
            a: vec![-5.0, -4.9, -4.8],
            b: vec![0.0, 0.0, 0.0],
            k: vec![10.0, -10.0],
            drift: -3.0,
            sigma_k: 1.0,
        };
        let q = forecast_q2(&p, 50, 3).unwrap();
        for (t, &qt) in q.iter().enumerate() {
            assert_eq!(qt, q_from_rate(p.a[t].exp()));
        }
    }

    #[test]
    fn negative_drift_lowers_forecast() {
        let (a, b, k) = example_abk();
        let data = synthetic(&a, &b, &k, 50, 2000);
        let p = fit_lee_carter(&data).unwrap().params;
        assert!(p.drift < 0.0);
        let mut frozen = p.clone();
        frozen.drift = 0.0;
        let q = forecast_q2(&p, 50, 5).unwrap();
        let q_frozen = forecast_q2(&frozen, 50, 5).unwrap();
        for (qt, qf) in q.iter().zip(&q_frozen) {
            assert!(qt < qf);
        }
    }

    #[test]
    fn stochastic_forecast_is_deterministic_per_seed() {
        let (a, b, k) = example_abk();
        let data = synthetic(&a, &b, &k, 50, 2000);
        let p = fit_lee_carter(&data).unwrap().params;
        let s = Streams::new(4);
        let qa =
            forecast_q2_stochastic(&p, 50, 5, &mut s.stream(&[domain::FORECAST, 1])).unwrap();
        let qb =
            forecast_q2_stochastic(&p, 50, 5, &mut s.stream(&[domain::FORECAST, 1])).unwrap();
        assert_eq!(qa, qb);
        assert!(qa.iter().all(|&q| q > 0.0 && q < 1.0));
    }

    #[test]
    fn age_out_of_range_is_rejected() {
        let (a, b, k) = example_abk();
        let data = synthetic(&a, &b, &k, 50, 2000);
        let p = fit_lee_carter(&data).unwrap().params;
        assert!(matches!(
            forecast_q2(&p, 52, 4).unwrap_err(),
            Error::AgeOutOfRange { .. }
        ));
        assert!(matches!(
            forecast_q2(&p, 40, 3).unwrap_err(),
            Error::AgeOutOfRange { .. }
        ));
    }

    #[test]
    fn q_rate_conversions_are_inverse() {
        for &m in &[1e-9, 1e-4, 0.01, 0.3, 2.0] {
            let q = q_from_rate(m);
            assert!((rate_from_q(q) - m).abs() < 1e-12 * m.max(1.0));
        }
    }

    #[test]
    fn enrichment_at_expectation_is_self_consistent() {
        // Appending the model's own expected year leaves the central forecast
        // unchanged up to refit numerics.
        let (a, b, _) = example_abk();
        // Exactly linear k: drift is exact, sigma_k = 0.
        let k: Vec<f64> = (0..12).map(|t| 8.25 - 1.5 * t as f64).collect();
        let data = synthetic(&a, &b, &k, 50, 2000);
        let p0 = fit_lee_carter(&data).unwrap().params;
        assert!(p0.sigma_k < 1e-9);

        let enrichment = Enrichment {
            synthetic_exposure: Some(100_000.0),
            draw: DeathDraw::Expectation,
        };
        let mut rng = Streams::new(1).stream(&[domain::ENRICH]);
        let p1 = enrich_and_refit(&p0, &data, &enrichment, &mut rng).unwrap();
        assert_eq!(p1.n_years(), p0.n_years() + 1);

        // Revised central forecast, aligned on calendar years.
        let q0 = forecast_q2(&p0, 50, 4).unwrap();
        let q1 = forecast_q2_from(&p1, 50, 4, 0).unwrap();
        // Entry 0 of q1 is the enriched in-sample year; compare year by year.
        for (t, (a0, a1)) in q0.iter().zip(&q1).enumerate() {
            assert!(
                (a0 - a1).abs() < 1e-6 * a0,
                "year {t}: {a0} vs {a1}"
            );
        }
    }

    #[test]
    fn enrichment_is_deterministic_per_seed() {
        let (a, b, k) = example_abk();
        let data = synthetic(&a, &b, &k, 50, 2000);
        let p0 = fit_lee_carter(&data).unwrap().params;
        let e = Enrichment::default();
        let s = Streams::new(77);
        let p1 = enrich_and_refit(&p0, &data, &e, &mut s.stream(&[domain::ENRICH, 5])).unwrap();
        let p2 = enrich_and_refit(&p0, &data, &e, &mut s.stream(&[domain::ENRICH, 5])).unwrap();
        assert_eq!(p1, p2);
    }

    #[test]
    fn doubled_deaths_raise_the_revised_forecast() {
        let (a, b, _) = example_abk();
        let k: Vec<f64> = (0..12).map(|t| 8.25 - 1.5 * t as f64).collect();
        let data = synthetic(&a, &b, &k, 50, 2000);
        let p0 = fit_lee_carter(&data).unwrap().params;
        let e = Enrichment {
            synthetic_exposure: Some(100_000.0),
            draw: DeathDraw::ScaledExpectation(2.0),
        };
        let mut rng = Streams::new(1).stream(&[domain::ENRICH]);
        let p1 = enrich_and_refit(&p0, &data, &e, &mut rng).unwrap();
        // One-year-ahead of the un-enriched model vs the same calendar year
        // re-forecast after seeing doubled deaths: all b_x > 0 here.
        let q0 = forecast_q2(&p0, 50, 4).unwrap();
        let q1 = forecast_q2_from(&p1, 50, 4, 0).unwrap();
        for (i, (a0, a1)) in q0.iter().zip(&q1).enumerate() {
            assert!(a1 > a0, "age index {i}: revised {a1} <= original {a0}");
        }
    }

    #[test]
    fn missing_exposures_without_synthetic_is_an_error() {
        let (a, b, k) = example_abk();
        let data = synthetic(&a, &b, &k, 50, 2000);
        let p0 = fit_lee_carter(&data).unwrap().params;
        let e = Enrichment {
            synthetic_exposure: None,
            draw: DeathDraw::Binomial,
        };
        let mut rng = Streams::new(1).stream(&[domain::ENRICH]);
        assert!(matches!(
            enrich_and_refit(&p0, &data, &e, &mut rng).unwrap_err(),
            Error::MissingExposures
        ));
    }
}
