//! Sample moments for Monte-Carlo reporting.

use serde::{Deserialize, Serialize};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStat {
    pub mean: f64,
    pub std_err: f64,
}

impl MeanStat {
    /// Mean and standard error (unbiased sample variance over `n`) of `xs`.
    /// A single sample has a standard error of zero.
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return MeanStat {
                mean: f64::NAN,
                std_err: f64::NAN,
            };
        }
        let mean = pairwise_sum(xs) / n as f64;
        if n == 1 {
            return MeanStat { mean, std_err: 0.0 };
        }
        let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = pairwise_sum(&sq) / (n - 1) as f64;
        MeanStat {
            mean,
            std_err: (var / n as f64).sqrt(),
        }
    }

    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn within(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_err
    }
}

/// Pairwise (cascade) summation. The result depends only on the order of `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}
