//! Ergodic-rate evaluation: Monte-Carlo ZF rate and closed-form bounds.

mod bounds;
mod mc;

use serde::{Deserialize, Serialize};

pub use bounds::{
    lb2_phi_independent, lower_bound_rates, power_scaling_limit, rate_from_snr, rate_no_ris,
    required_antennas, upper_bound, PhaseFreeBound, PowerScalingLimit, RateModel,
};
pub use mc::{exact_rate_mc, zf_trial_rates, McRates};

use crate::channel::{PhaseShifts, SystemConfig};
use crate::Result;

/// Every per-user rate quantity for one `(config, phase)` pair, in bits/s/Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub per_user_mc_rate: Vec<f64>,
    pub per_user_mc_std_err: Vec<f64>,
    pub per_user_lb: Vec<f64>,
    pub per_user_lb2: Vec<f64>,
    pub per_user_lb2_approx: Vec<f64>,
    pub per_user_ub: Vec<f64>,
    pub per_user_ub_aligned: Vec<f64>,
    pub mc_sum_rate: f64,
    pub mc_sum_rate_std_err: f64,
    pub mc_min_rate: f64,
    pub mc_min_rate_std_err: f64,
    pub rejected_trials: usize,
    pub trials: usize,
    pub seed: u64,
    pub tau_overhead: f64,
}

/// Runs the Monte-Carlo simulation and evaluates all closed-form bounds.
pub fn rate_report(
    config: &SystemConfig,
    phase: &PhaseShifts,
    trials: usize,
    seed: u64,
) -> Result<RateReport> {
    let model = RateModel::new(config)?;
    let lb = model.lower_bound(phase)?;
    let (ub, ub_aligned) = model.upper_bound(phase)?;
    let mc = exact_rate_mc(config, phase, trials, seed)?;
    Ok(RateReport {
        per_user_mc_rate: mc.means(),
        per_user_mc_std_err: mc.std_errs(),
        per_user_lb: lb,
        per_user_lb2: model.lb2(),
        per_user_lb2_approx: model.lb2_approx(),
        per_user_ub: ub,
        per_user_ub_aligned: ub_aligned,
        mc_sum_rate: mc.sum.mean,
        mc_sum_rate_std_err: mc.sum.std_err,
        mc_min_rate: mc.min.mean,
        mc_min_rate_std_err: mc.min.std_err,
        rejected_trials: mc.rejected,
        trials,
        seed,
        tau_overhead: config.tau_overhead(),
    })
}
