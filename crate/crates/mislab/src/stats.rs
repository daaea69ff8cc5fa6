//! Population summaries and bootstrap standard errors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Variance with divisor `n`, so that `mse = variance + bias^2` exactly.
pub fn population_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

/// Standard deviation with divisor `n - 1`.
pub fn sample_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let n = xs.len() as f64;
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)).sqrt()
}

pub fn standard_error(xs: &[f64]) -> f64 {
    sample_std(xs) / (xs.len() as f64).sqrt()
}

/// Mean squared error, variance and squared bias of estimates around `truth`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSummary {
    pub mse: f64,
    pub variance: f64,
    pub bias_sq: f64,
}

pub fn error_summary(estimates: &[f64], truth: f64) -> ErrorSummary {
    let m = mean(estimates);
    let variance = population_variance(estimates);
    let bias_sq = (m - truth) * (m - truth);
    ErrorSummary {
        mse: variance + bias_sq,
        variance,
        bias_sq,
    }
}

/// Bootstrap standard error of `statistic` over `resamples` resamples with replacement.
pub fn bootstrap_se(
    xs: &[f64],
    statistic: impl Fn(&[f64]) -> f64,
    resamples: usize,
    seed: u64,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf = vec![0.0; xs.len()];
    let stats: Vec<f64> = (0..resamples)
        .map(|_| {
            for slot in buf.iter_mut() {
                *slot = xs[rng.random_range(0..xs.len())];
            }
            statistic(&buf)
        })
        .collect();
    sample_std(&stats)
}
