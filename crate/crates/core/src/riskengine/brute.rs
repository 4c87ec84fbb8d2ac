//! Exact enumeration of the one-year idiosyncratic CDR for small cohorts.
//!
//! Every death pattern of up to 20 lives is enumerated with its
//! Bernoulli-product probability, giving the exact distribution of
//! (E[Z] - Z) * eta against which simulation and closed forms are checked.

use crate::error::{Error, Result};

/// Exact discrete distribution as (outcome, probability) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    pub outcomes: Vec<(f64, f64)>,
}

impl ExactDistribution {
    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|(_, p)| p).sum()
    }

    pub fn mean(&self) -> f64 {
        self.outcomes.iter().map(|(x, p)| x * p).sum()
    }

    pub fn central_moment(&self, j: u32) -> f64 {
        let mean = self.mean();
        self.outcomes
            .iter()
            .map(|(x, p)| (x - mean).powi(j as i32) * p)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        self.central_moment(2)
    }

    pub fn skewness(&self) -> f64 {
        let v = self.variance();
        self.central_moment(3) / v.powf(1.5)
    }

    /// Population central moments 0..=6, for delta-method standard errors.
    pub fn central_moments_to_6(&self) -> [f64; 7] {
        let mean = self.mean();
        let mut m = [0.0f64; 7];
        for &(x, p) in &self.outcomes {
            let d = x - mean;
            let mut pw = p;
            for mj in m.iter_mut() {
                *mj += pw;
                pw *= d;
            }
        }
        m
    }
}

/// Enumerates the exact CDR distribution of one year: deaths are independent
/// Bernoulli(q) over the alive `sums`, the outcome is (E[Z] - Z) * eta.
pub fn brute_force_idios(sums: &[f64], q: f64, eta: f64) -> Result<ExactDistribution> {
    let l = sums.len();
    if l > 20 {
        return Err(Error::CohortTooLarge(l));
    }
    assert!((0.0..1.0).contains(&q));
    let expected_z: f64 = q * sums.iter().sum::<f64>();
    let patterns = 1usize << l;
    let mut outcomes = Vec::with_capacity(patterns);
    for mask in 0..patterns {
        let mut z = 0.0;
        let deaths = (mask as u32).count_ones();
        for (k, &s) in sums.iter().enumerate() {
            if mask & (1 << k) != 0 {
                z += s;
            }
        }
        let prob = q.powi(deaths as i32) * (1.0 - q).powi((l as u32 - deaths) as i32);
        outcomes.push(((expected_z - z) * eta, prob));
    }
    Ok(ExactDistribution { outcomes })
}
