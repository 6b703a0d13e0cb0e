use std::f64::consts::TAU;

use crate::channel::{build_los, PhaseShifts, SystemConfig};
use crate::{Error, Result};

/// Phases concentrating the RIS beam on user `k`: `θ_n = −∠([a_Nᴴ]_n[h̄_k]_n)`,
/// so that `a_NᴴΦh̄_k = N`.
pub fn align_phase(config: &SystemConfig, k: usize) -> Result<PhaseShifts> {
    if k >= config.k {
        return Err(Error::InvalidConfig(format!(
            "user index {k} out of range (K={})",
            config.k
        )));
    }
    let los = build_los(config);
    let thetas: Vec<f64> = los
        .a_n
        .iter()
        .zip(los.hbar.column(k).iter())
        .map(|(a, h)| -(a.conj() * h).arg())
        .collect();
    Ok(PhaseShifts::from_thetas(&thetas))
}

/// Snaps every `θ_n` to the nearest point of `{2πm/2^bits}`; exact ties go
/// to the smaller angle.
pub fn quantize_phase(phase: &PhaseShifts, bits: u32) -> Result<PhaseShifts> {
    if bits == 0 || bits > 52 {
        return Err(Error::InvalidConfig(format!(
            "bits must be in 1..=52, got {bits}"
        )));
    }
    let levels = 1u64 << bits;
    let step = TAU / levels as f64;
    let thetas: Vec<f64> = phase
        .thetas()
        .into_iter()
        .map(|t| {
            let m = (t / step - 0.5).ceil() as u64 % levels;
            m as f64 * step
        })
        .collect();
    Ok(PhaseShifts::from_thetas(&thetas))
}
