//! Cohort state: heterogeneous sums insured, death-indicator simulation and
//! the evolution of the surviving-sums vector.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Premium payment pattern of the contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PremiumMode {
    Single,
    Annual,
}

/// A cohort: policyholders sharing age, term and survival law, differing only
/// in sums insured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cohort {
    /// Age at inception.
    pub age: u32,
    /// Number of policyholders l_0.
    pub size: usize,
    /// Policy term in years.
    pub n: usize,
    /// Sums insured s_0, one entry per policyholder, all positive.
    pub sums: Vec<f64>,
    pub premium_mode: PremiumMode,
}

impl Cohort {
    pub fn new(age: u32, n: usize, sums: Vec<f64>, premium_mode: PremiumMode) -> Self {
        assert!(n >= 1 && !sums.is_empty());
        assert!(sums.iter().all(|&s| s > 0.0));
        Cohort {
            age,
            size: sums.len(),
            n,
            sums,
            premium_mode,
        }
    }

    pub fn total_sums(&self) -> f64 {
        self.sums.iter().sum()
    }
}

/// Cohort state at an integer time: the surviving-sums vector S_t, with dead
/// policyholders at exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CohortState {
    pub t: usize,
    pub surviving_sums: Vec<f64>,
    pub alive_count: usize,
}

impl CohortState {
    pub fn at_inception(cohort: &Cohort) -> Self {
        CohortState {
            t: 0,
            surviving_sums: cohort.sums.clone(),
            alive_count: cohort.size,
        }
    }

    pub fn total_alive_sums(&self) -> f64 {
        self.surviving_sums.iter().sum()
    }

    /// Raw moment of order j of the alive sums, (1/l_t) sum s_k^j.
    pub fn raw_moment(&self, j: u32) -> Result<f64> {
        if self.alive_count == 0 {
            return Err(Error::EmptyCohort);
        }
        let sum: f64 = self
            .surviving_sums
            .iter()
            .filter(|&&s| s > 0.0)
            .map(|&s| s.powi(j as i32))
            .sum();
        Ok(sum / self.alive_count as f64)
    }
}

/// Sums-insured sampling specification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumsSpec {
    pub mean: f64,
    pub cov: f64,
    pub distribution: SumsDistribution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SumsDistribution {
    Lognormal,
    Constant,
}

/// Samples a sums-insured vector. Lognormal parameters are solved from the
/// (mean, CoV) pair: sigma_ln^2 = ln(1 + cov^2), mu_ln = ln(mean) - sigma_ln^2 / 2.
pub fn generate_sums<R: Rng + ?Sized>(spec: &SumsSpec, size: usize, rng: &mut R) -> Vec<f64> {
    assert!(size >= 1 && spec.mean > 0.0 && spec.cov >= 0.0);
    match spec.distribution {
        SumsDistribution::Constant => vec![spec.mean; size],
        SumsDistribution::Lognormal if spec.cov == 0.0 => vec![spec.mean; size],
        SumsDistribution::Lognormal => {
            let var_ln = (1.0 + spec.cov * spec.cov).ln();
            let mu_ln = spec.mean.ln() - 0.5 * var_ln;
            let sigma_ln = var_ln.sqrt();
            (0..size)
                .map(|_| {
                    let z: f64 = rng.sample(rand_distr::StandardNormal);
                    (mu_ln + sigma_ln * z).exp()
                })
                .collect()
        }
    }
}

/// Simulates one year of deaths: i.i.d. Bernoulli(q) per alive policyholder.
///
/// Returns the death indicators for the year and the next state. Dead
/// policyholders stay dead and their sums stay zero. One uniform is consumed
/// per slot whether alive or not, so policyholder k's outcome depends only on
/// its own state and the k-th draw of the stream.
pub fn simulate_deaths<R: Rng + ?Sized>(
    state: &CohortState,
    q: f64,
    rng: &mut R,
) -> (Vec<bool>, CohortState) {
    assert!((0.0..1.0).contains(&q));
    let mut indicators = vec![false; state.surviving_sums.len()];
    let mut next_sums = state.surviving_sums.clone();
    let mut alive = 0usize;
    for (k, sum) in state.surviving_sums.iter().enumerate() {
        let u: f64 = rng.gen();
        if *sum > 0.0 {
            if u < q {
                indicators[k] = true;
                next_sums[k] = 0.0;
            } else {
                alive += 1;
            }
        }
    }
    (
        indicators,
        CohortState {
            t: state.t + 1,
            surviving_sums: next_sums,
            alive_count: alive,
        },
    )
}

/// Total sums insured of the deaths of the year, Z_t = <S_t, Lambda_t^B>.
pub fn death_sums(state: &CohortState, indicators: &[bool]) -> f64 {
    assert_eq!(state.surviving_sums.len(), indicators.len());
    state
        .surviving_sums
        .iter()
        .zip(indicators)
        .filter(|(_, &d)| d)
        .map(|(s, _)| s)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{domain, Streams};
    use rand::RngCore;

    fn state_of(sums: Vec<f64>) -> CohortState {
        let alive = sums.iter().filter(|&&s| s > 0.0).count();
        CohortState {
            t: 0,
            surviving_sums: sums,
            alive_count: alive,
        }
    }

    #[test]
    fn constant_spec_gives_constant_sums() {
        let spec = SumsSpec {
            mean: 100_000.0,
            cov: 0.0,
            distribution: SumsDistribution::Lognormal,
        };
        let mut rng = Streams::new(1).stream(&[domain::SUMS]);
        let sums = generate_sums(&spec, 5, &mut rng);
        assert!(sums.iter().all(|&s| s == 100_000.0));
    }

    #[test]
    fn lognormal_moments_at_scale() {
        let spec = SumsSpec {
            mean: 100_000.0,
            cov: 2.0,
            distribution: SumsDistribution::Lognormal,
        };
        let n = 1_000_000;
        let mut rng = Streams::new(42).stream(&[domain::SUMS]);
        let sums = generate_sums(&spec, n, &mut rng);
        let mean = sums.iter().sum::<f64>() / n as f64;
        let var = sums.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n as f64 - 1.0);
        let sd = var.sqrt();
        // SE of the mean: sd/sqrt(n) with sd = 2 * mean.
        let se = sd / (n as f64).sqrt();
        assert!((mean - 100_000.0).abs() < 3.0 * se, "mean {mean} se {se}");
        let cov = sd / mean;
        assert!((cov - 2.0).abs() < 0.04, "cov {cov}");
    }

    #[test]
    fn fixed_seed_reproduces_sums() {
        let spec = SumsSpec {
            mean: 1.0,
            cov: 2.0,
            distribution: SumsDistribution::Lognormal,
        };
        let a = generate_sums(&spec, 100, &mut Streams::new(9).stream(&[domain::SUMS]));
        let b = generate_sums(&spec, 100, &mut Streams::new(9).stream(&[domain::SUMS]));
        assert_eq!(a, b);
    }

    #[test]
    fn no_deaths_at_q_zero() {
        let state = state_of(vec![1.0, 2.0, 3.0]);
        let mut rng = Streams::new(3).stream(&[domain::DEATHS]);
        let (ind, next) = simulate_deaths(&state, 0.0, &mut rng);
        assert!(ind.iter().all(|&d| !d));
        assert_eq!(next.surviving_sums, state.surviving_sums);
        assert_eq!(next.t, 1);
    }

    #[test]
    fn dead_stay_dead() {
        let state = state_of(vec![1.0, 0.0, 3.0]);
        let mut rng = Streams::new(3).stream(&[domain::DEATHS]);
        let (ind, next) = simulate_deaths(&state, 0.999, &mut rng);
        assert!(!ind[1]);
        assert_eq!(next.surviving_sums[1], 0.0);
        // Absorbing: next sums never exceed current.
        for (a, b) in next.surviving_sums.iter().zip(&state.surviving_sums) {
            assert!(a <= b);
            assert!(*a == 0.0 || a == b);
        }
    }

    #[test]
    fn binomial_death_count_mean() {
        // l = 10,000, q = 0.003, 10^5 replications: mean count within 3 se of 30.
        let l = 10_000;
        let reps = 100_000u64;
        let q = 0.003;
        let state = state_of(vec![1.0; l]);
        let streams = Streams::new(123);
        let mut total = 0u64;
        for rep in 0..reps {
            let mut rng = streams.stream(&[domain::DEATHS, rep]);
            let (ind, _) = simulate_deaths(&state, q, &mut rng);
            total += ind.iter().filter(|&&d| d).count() as u64;
        }
        let mean = total as f64 / reps as f64;
        let se = (l as f64 * q * (1.0 - q) / reps as f64).sqrt();
        assert!(
            (mean - 30.0).abs() < 3.0 * se,
            "mean deaths {mean}, se {se}"
        );
    }

    #[test]
    fn death_sums_examples() {
        let state = state_of(vec![250_000.0, 100_000.0]);
        assert_eq!(death_sums(&state, &[false, false]), 0.0);
        assert_eq!(death_sums(&state, &[true, false]), 250_000.0);
        let equal = state_of(vec![5.0; 4]);
        assert_eq!(death_sums(&equal, &[true; 4]), 20.0);
    }

    #[test]
    fn raw_moment_examples() {
        let equal = state_of(vec![7.0; 3]);
        assert_eq!(equal.raw_moment(2).unwrap(), 49.0);
        let two = state_of(vec![1.0, 3.0]);
        assert_eq!(two.raw_moment(2).unwrap(), 5.0);
        let empty = state_of(vec![0.0, 0.0]);
        assert!(matches!(empty.raw_moment(1), Err(Error::EmptyCohort)));
    }

    #[test]
    fn count_consistency() {
        let state = state_of(vec![1.0; 500]);
        let mut rng = Streams::new(17).stream(&[domain::DEATHS, 0]);
        let (ind, next) = simulate_deaths(&state, 0.3, &mut rng);
        let deaths = ind.iter().filter(|&&d| d).count();
        assert_eq!(deaths, state.alive_count - next.alive_count);
    }

    /// Replays a fixed sequence of u64 words, to pin down which draw feeds
    /// which policyholder.
    struct Replay {
        words: Vec<u64>,
        next: usize,
    }

    impl RngCore for Replay {
        fn next_u32(&mut self) -> u32 {
            self.next_u64() as u32
        }
        fn next_u64(&mut self) -> u64 {
            let w = self.words[self.next];
            self.next += 1;
            w
        }
        fn fill_bytes(&mut self, dest: &mut [u8]) {
            for b in dest.iter_mut() {
                *b = self.next_u64() as u8;
            }
        }
        fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
            self.fill_bytes(dest);
            Ok(())
        }
    }

    #[test]
    fn exchangeability_under_permutation() {
        // Permuting policyholders together with their per-policyholder draws
        // permutes the outputs: outcome k depends only on (state_k, draw_k).
        let sums = vec![1.0, 2.0, 0.0, 4.0, 5.0];
        let mut seed_rng = Streams::new(5).stream(&[domain::DEATHS, 9]);
        let words: Vec<u64> = (0..sums.len()).map(|_| seed_rng.next_u64()).collect();
        let perm = [3usize, 0, 4, 2, 1];

        let state = state_of(sums.clone());
        let (ind, next) = simulate_deaths(
            &state,
            0.5,
            &mut Replay {
                words: words.clone(),
                next: 0,
            },
        );

        let perm_sums: Vec<f64> = perm.iter().map(|&i| sums[i]).collect();
        let perm_words: Vec<u64> = perm.iter().map(|&i| words[i]).collect();
        let (ind_p, next_p) = simulate_deaths(
            &state_of(perm_sums),
            0.5,
            &mut Replay {
                words: perm_words,
                next: 0,
            },
        );

        for (j, &i) in perm.iter().enumerate() {
            assert_eq!(ind_p[j], ind[i]);
            assert_eq!(next_p.surviving_sums[j], next.surviving_sums[i]);
        }
        assert_eq!(next_p.alive_count, next.alive_count);
    }
}
