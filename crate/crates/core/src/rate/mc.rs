use rayon::prelude::*;

use super::bounds::rate_from_snr;
use crate::channel::{substream_rng, ChannelSampler, PhaseShifts, SystemConfig};
use crate::estimation::Estimator;
use crate::linalg::cholesky_with_floor;
use crate::stats::{pairwise_sum, MeanStat};
use crate::{CMat, Error, Result};

/// Resampling attempts per trial before giving up.
const MAX_ATTEMPTS: u64 = 16;

/// Monte-Carlo ergodic rates with ZF detection on the estimated channel.
#[derive(Debug, Clone, PartialEq)]
pub struct McRates {
    pub per_user: Vec<MeanStat>,
    pub sum: MeanStat,
    /// Per-trial minimum over users.
    pub min: MeanStat,
    pub trials: usize,
    pub seed: u64,
    /// Trials redrawn because `Q̂ᴴQ̂` was numerically singular.
    pub rejected: usize,
}

impl McRates {
    pub fn means(&self) -> Vec<f64> {
        self.per_user.iter().map(|m| m.mean).collect()
    }

    pub fn std_errs(&self) -> Vec<f64> {
        self.per_user.iter().map(|m| m.std_err).collect()
    }
}

/// Per-user rates of one trial, or `None` when `Q̂ᴴQ̂` is singular.
///
/// With `G = Q̂ᴴQ̂` and `X = G⁻¹Q̂ᴴE` (so `X_ki = a_kᴴe_i`), user `k` sees
/// `p / (p·Σ_i|X_ki|² + σ²·[G⁻¹]_kk)`.
pub fn zf_trial_rates(
    qhat: &CMat,
    e: &CMat,
    p: f64,
    sigma2: f64,
    tau_overhead: f64,
) -> Option<Vec<f64>> {
    let gram = qhat.adjoint() * qhat;
    let chol = cholesky_with_floor(&gram, 1e-12)?;
    let ginv = chol.inverse();
    let x = chol.solve(&(qhat.adjoint() * e));
    let rates: Vec<f64> = (0..qhat.ncols())
        .map(|k| {
            let interference: f64 = x.row(k).iter().map(|z| z.norm_sqr()).sum();
            let noise = ginv[(k, k)].re;
            rate_from_snr(tau_overhead, p / (p * interference + sigma2 * noise))
        })
        .collect();
    rates
        .iter()
        .all(|r| r.is_finite() && *r >= 0.0)
        .then_some(rates)
}

/// Averages the instantaneous ZF rate over `trials` independent draws.
///
/// Trial `t` uses substream `t` of `seed`; a rejected trial moves to
/// substream `t + j·2⁴⁰` for its `j`-th retry. Trials run in parallel and
/// results are reduced in trial order, so the output does not depend on the
/// thread count.
pub fn exact_rate_mc(
    config: &SystemConfig,
    phase: &PhaseShifts,
    trials: usize,
    seed: u64,
) -> Result<McRates> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let sampler = ChannelSampler::new(config, phase)?;
    let estimator = Estimator::new(&sampler)?;
    let tau_o = config.tau_overhead();
    let outcomes: Vec<Result<(Vec<f64>, u64)>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            for attempt in 0..MAX_ATTEMPTS {
                let mut rng = substream_rng(seed, t + (attempt << 40));
                let r = sampler.sample(&mut rng);
                let (qhat, e) = estimator.estimate(&r)?;
                if let Some(rates) = zf_trial_rates(&qhat, &e, config.p, config.sigma2, tau_o) {
                    return Ok((rates, attempt));
                }
            }
            Err(Error::Degenerate(format!(
                "trial {t}: Q^H Q singular after {MAX_ATTEMPTS} draws"
            )))
        })
        .collect();
    let k = config.k;
    let mut per_user = vec![Vec::with_capacity(trials); k];
    let mut sums = Vec::with_capacity(trials);
    let mut mins = Vec::with_capacity(trials);
    let mut rejected = 0usize;
    for o in outcomes {
        let (rates, attempts) = o?;
        rejected += attempts as usize;
        for (acc, r) in per_user.iter_mut().zip(&rates) {
            acc.push(*r);
        }
        sums.push(pairwise_sum(&rates));
        mins.push(rates.iter().copied().fold(f64::INFINITY, f64::min));
    }
    Ok(McRates {
        per_user: per_user
            .iter()
            .map(|xs| MeanStat::from_samples(xs))
            .collect(),
        sum: MeanStat::from_samples(&sums),
        min: MeanStat::from_samples(&mins),
        trials,
        seed,
        rejected,
    })
}
