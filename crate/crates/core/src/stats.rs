//! Sample-moment helpers shared by the risk engine and its verification
//! suites.
//!
//! All passes run in index order so results are bit-identical across worker
//! counts.

/// First three sample moments of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n-1 denominator).
    pub sd: f64,
    /// Skewness b1 = m3 / m2^(3/2) with biased central moments.
    pub skewness: f64,
}

impl Moments {
    pub fn of(samples: &[f64]) -> Self {
        let n = samples.len();
        assert!(n > 0, "moments of empty sample");
        let nf = n as f64;
        let mean = samples.iter().sum::<f64>() / nf;
        let mut m2 = 0.0;
        let mut m3 = 0.0;
        for &x in samples {
            let d = x - mean;
            m2 += d * d;
            m3 += d * d * d;
        }
        let var_biased = m2 / nf;
        let sd = if n > 1 { (m2 / (nf - 1.0)).sqrt() } else { 0.0 };
        let skewness = if var_biased > 0.0 {
            (m3 / nf) / var_biased.powf(1.5)
        } else {
            0.0
        };
        Moments {
            n,
            mean,
            sd,
            skewness,
        }
    }
}

/// Biased central moment of order `j`.
pub fn central_moment(samples: &[f64], j: u32) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    samples.iter().map(|&x| (x - mean).powi(j as i32)).sum::<f64>() / n
}

/// Lower empirical quantile: the order statistic at 1-based rank
/// ceil(p * n) of the ascending sample, the infimum form of the empirical
/// distribution's generalized inverse.
pub fn lower_quantile(sorted_ascending: &[f64], p: f64) -> f64 {
    assert!(!sorted_ascending.is_empty());
    assert!((0.0..=1.0).contains(&p));
    let n = sorted_ascending.len();
    let rank = (p * n as f64).ceil() as usize;
    sorted_ascending[rank.clamp(1, n) - 1]
}

/// Standard error of the sample mean.
pub fn se_mean(sd: f64, n: usize) -> f64 {
    sd / (n as f64).sqrt()
}

/// Asymptotic standard error of the sample variance given the population
/// central moments mu4 and mu2 (delta method): sqrt((mu4 - mu2^2) / n).
pub fn se_variance(mu2: f64, mu4: f64, n: usize) -> f64 {
    ((mu4 - mu2 * mu2).max(0.0) / n as f64).sqrt()
}

/// Asymptotic standard error of the sample skewness given population central
/// moments mu2..mu6, by the delta method on (m2, m3).
///
/// For a normal population this reduces to sqrt(6/n).
pub fn se_skewness(mu: &[f64; 7], n: usize) -> f64 {
    let (mu2, mu3, mu4, mu5, mu6) = (mu[2], mu[3], mu[4], mu[5], mu[6]);
    let var_m2 = mu4 - mu2 * mu2;
    let var_m3 = mu6 - mu3 * mu3 - 6.0 * mu4 * mu2 + 9.0 * mu2 * mu2 * mu2;
    let cov_m2_m3 = mu5 - 4.0 * mu2 * mu3;
    let g2 = -1.5 * mu3 * mu2.powf(-2.5);
    let g3 = mu2.powf(-1.5);
    let var = g2 * g2 * var_m2 + g3 * g3 * var_m3 + 2.0 * g2 * g3 * cov_m2_m3;
    (var.max(0.0) / n as f64).sqrt()
}

/// Standard error of the sample skewness estimated from the sample itself via
/// the influence function. Used when population moments are unknown.
pub fn se_skewness_empirical(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let mut m = [0.0f64; 7];
    for &x in samples {
        let d = x - mean;
        let mut p = 1.0;
        for mj in m.iter_mut() {
            *mj += p;
            p *= d;
        }
    }
    for mj in m.iter_mut() {
        *mj /= n;
    }
    se_skewness(&m, samples.len())
}
