//! First- and second-order demographic bases on the cohort diagonal.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::mortality::lee_carter::{forecast_q2, LeeCarterParams};

/// Cap keeping first-order probabilities strictly below one under stress.
pub const Q_CLIP: f64 = 1.0 - 1e-9;

/// Annual death probabilities along the cohort diagonal: entry t applies to
/// the policy year (t, t+1], when the cohort is aged `cohort_age + t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemographicBasis {
    /// Second-order (best estimate) probabilities.
    pub q2: Vec<f64>,
    /// First-order (stressed pricing) probabilities.
    pub q1: Vec<f64>,
    pub cohort_age: u32,
    /// Calendar year of the valuation the forecast starts from.
    pub base_year: i32,
}

impl DemographicBasis {
    pub fn horizon(&self) -> usize {
        self.q2.len()
    }
}

/// Builds the basis: central second-order forecast plus a multiplicative
/// first-order stress, clipped below one.
pub fn build_basis(
    params: &LeeCarterParams,
    age: u32,
    n: usize,
    stress_factor: f64,
) -> Result<DemographicBasis> {
    assert!(stress_factor > 0.0);
    let q2 = forecast_q2(params, age, n)?;
    let q1 = q2.iter().map(|&q| (stress_factor * q).min(Q_CLIP)).collect();
    Ok(DemographicBasis {
        q2,
        q1,
        cohort_age: age,
        base_year: params.last_year(),
    })
}

/// Probability distortion ratios between the first- and second-order bases:
/// `ratios_alive[t] = p1[t] / p2[t]`, `ratios_dead[t] = q1[t] / q2[t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distortion {
    pub ratios_alive: Vec<f64>,
    pub ratios_dead: Vec<f64>,
}

impl Distortion {
    pub fn from_basis(basis: &DemographicBasis) -> Distortion {
        let ratios_alive = basis
            .q1
            .iter()
            .zip(&basis.q2)
            .map(|(&q1, &q2)| (1.0 - q1) / (1.0 - q2))
            .collect();
        let ratios_dead = basis.q1.iter().zip(&basis.q2).map(|(&q1, &q2)| q1 / q2).collect();
        Distortion {
            ratios_alive,
            ratios_dead,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_params(q_level: f64, n_ages: usize) -> LeeCarterParams {
        // a chosen so the central forecast equals q_level at every age.
        let m = -(1.0 - q_level).ln();
        LeeCarterParams {
            age_start: 50,
            year_start: 2000,
            a: vec![m.ln(); n_ages],
            b: vec![1.0 / n_ages as f64; n_ages],
            k: vec![0.0, 0.0],
            drift: 0.0,
            sigma_k: 0.0,
        }
    }

    #[test]
    fn stress_is_a_multiplication() {
        let params = flat_params(0.003, 10);
        let basis = build_basis(&params, 50, 10, 1.2).unwrap();
        assert!((basis.q2[0] - 0.003).abs() < 1e-12);
        assert!((basis.q1[0] - 0.0036).abs() < 1e-12);
    }

    #[test]
    fn unit_stress_is_identity() {
        let params = flat_params(0.01, 5);
        let basis = build_basis(&params, 50, 5, 1.0).unwrap();
        assert_eq!(basis.q1, basis.q2);
    }

    #[test]
    fn extreme_stress_is_clipped() {
        let params = flat_params(0.9, 3);
        let basis = build_basis(&params, 50, 3, 1.2).unwrap();
        for (&q1, &q2) in basis.q1.iter().zip(&basis.q2) {
            assert!((q2 - 0.9).abs() < 1e-12);
            assert_eq!(q1, Q_CLIP);
        }
    }

    #[test]
    fn distortion_is_unit_without_stress() {
        let params = flat_params(0.01, 5);
        let basis = build_basis(&params, 50, 5, 1.0).unwrap();
        let d = Distortion::from_basis(&basis);
        assert!(d.ratios_alive.iter().all(|&r| (r - 1.0).abs() < 1e-15));
        assert!(d.ratios_dead.iter().all(|&r| (r - 1.0).abs() < 1e-15));
    }

    #[test]
    fn distortion_ratios_are_positive() {
        let params = flat_params(0.01, 5);
        let basis = build_basis(&params, 50, 5, 1.2).unwrap();
        let d = Distortion::from_basis(&basis);
        assert!(d.ratios_alive.iter().all(|&r| r > 0.0 && r < 1.0));
        assert!(d.ratios_dead.iter().all(|&r| (r - 1.2).abs() < 1e-12));
    }
}
