//! MMSE estimation of the aggregated channel and its deterministic statistics.
//!
//! With `x_k = Nα_kβ/(δ+1) + γ_k` the per-antenna variance of the random part
//! of `q_k` and `s = σ²/(τp)` the despread pilot noise, the estimator shrinks
//! the observation towards the LoS mean by `κ_k = x_k/(x_k + s)` and leaves a
//! per-antenna error power `ε_k = (1/x_k + 1/s)⁻¹`.

use crate::channel::{steering_inner, ChannelRealization, ChannelSampler, SystemConfig};
use crate::linalg::hpd_inverse;
use crate::{CMat, Error, Result, C64};

/// Scalar estimator coefficients; cheap even for huge `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct MmseCoefficients {
    /// `x_k = Nα_kβ/(δ+1) + γ_k`.
    pub variance: Vec<f64>,
    /// `σ²/(τp)`.
    pub noise: f64,
    pub kappa: Vec<f64>,
    pub epsilon: Vec<f64>,
}

pub fn mmse_coefficients(config: &SystemConfig) -> Result<MmseCoefficients> {
    config.validate()?;
    let s = config.pilot_noise_var();
    let variance: Vec<f64> = (0..config.k).map(|k| config.channel_variance(k)).collect();
    let kappa = variance.iter().map(|x| x / (x + s)).collect();
    let epsilon = variance.iter().map(|x| 1.0 / (1.0 / x + 1.0 / s)).collect();
    Ok(MmseCoefficients {
        variance,
        noise: s,
        kappa,
        epsilon,
    })
}

/// Estimator coefficients plus the K×K second-order statistics `Λ`.
#[derive(Debug, Clone)]
pub struct ChannelStatistics {
    pub kappa: Vec<f64>,
    pub epsilon: Vec<f64>,
    /// `x_k`, see [`MmseCoefficients::variance`].
    pub variance: Vec<f64>,
    /// `σ²/(τp)`.
    pub noise: f64,
    /// Gram matrix of the user steering vectors, `[h̄_kᴴ h̄_i]`.
    pub gram: CMat,
    pub lambda: CMat,
    pub lambda_inv: CMat,
}

impl ChannelStatistics {
    /// `Υ = diag{κ_k}`.
    pub fn upsilon(&self) -> CMat {
        CMat::from_fn(self.kappa.len(), self.kappa.len(), |i, j| {
            if i == j {
                C64::new(self.kappa[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn epsilon_sum(&self) -> f64 {
        self.epsilon.iter().sum()
    }
}

/// Builds `κ`, `ε` and `Λ = (β/(δ+1))ΥH₁ᴴH₁Υ + diag{γ_k + σ²/(τp)}Υ²`.
///
/// Steering inner products use the closed form, so the cost is O(K²)
/// regardless of `N`.
pub fn compute_statistics(config: &SystemConfig) -> Result<ChannelStatistics> {
    let MmseCoefficients {
        variance,
        noise,
        kappa,
        epsilon,
    } = mmse_coefficients(config)?;
    let k = config.k;
    let angles = &config.user_ris_angles;
    let gram = CMat::from_fn(k, k, |i, j| {
        if i == j {
            C64::new(config.n as f64, 0.0)
        } else {
            steering_inner(config.n, angles[i], angles[j], config.d_over_lambda)
        }
    });
    let c = config.nlos_ris_gain();
    let lambda = CMat::from_fn(k, k, |i, j| {
        if i == j {
            C64::new((variance[i] + noise) * kappa[i] * kappa[i], 0.0)
        } else {
            gram[(i, j)] * (c * (config.alpha[i] * config.alpha[j]).sqrt() * kappa[i] * kappa[j])
        }
    });
    let lambda_inv = hpd_inverse(&lambda, "Lambda")?;
    Ok(ChannelStatistics {
        kappa,
        epsilon,
        variance,
        noise,
        gram,
        lambda,
        lambda_inv,
    })
}

/// MMSE estimator bound to one `(config, phase)` pair.
#[derive(Debug, Clone)]
pub struct Estimator {
    kappa: Vec<f64>,
    mean: CMat,
}

impl Estimator {
    pub fn new(sampler: &ChannelSampler) -> Result<Self> {
        let coeffs = mmse_coefficients(sampler.config())?;
        Ok(Estimator {
            kappa: coeffs.kappa,
            mean: sampler.channel_mean(),
        })
    }

    /// LoS mean of `Q`.
    pub fn mean(&self) -> &CMat {
        &self.mean
    }

    /// `(Q̂, E)` with `E = Q − Q̂`.
    pub fn estimate(&self, r: &ChannelRealization) -> Result<(CMat, CMat)> {
        if r.q.shape() != self.mean.shape() || r.pilot_noise.shape() != self.mean.shape() {
            return Err(Error::DimensionMismatch(format!(
                "realization is {:?}, estimator expects {:?}",
                r.q.shape(),
                self.mean.shape()
            )));
        }
        let mut qhat = &r.q + &r.pilot_noise - &self.mean;
        for (mut col, kappa) in qhat.column_iter_mut().zip(&self.kappa) {
            col.scale_mut(*kappa);
        }
        qhat += &self.mean;
        let e = &r.q - &qhat;
        Ok((qhat, e))
    }
}

/// One-shot MMSE estimate of `realization`, drawn under `config` and its stored phase.
pub fn mmse_estimate(
    config: &SystemConfig,
    realization: &ChannelRealization,
) -> Result<(CMat, CMat)> {
    if realization.phase.len() != config.n || realization.h1.shape() != (config.n, config.k) {
        return Err(Error::DimensionMismatch(format!(
            "realization has N={} K={}, config has N={} K={}",
            realization.h1.nrows(),
            realization.h1.ncols(),
            config.n,
            config.k
        )));
    }
    let sampler = ChannelSampler::new(config, &realization.phase)?;
    Estimator::new(&sampler)?.estimate(realization)
}
