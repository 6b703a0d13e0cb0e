use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{build_los, LosChannels, PhaseShifts, SystemConfig};
use crate::linalg::{cn01, complex_gaussian};
use crate::{CMat, Error, Result, C64};

/// Independent generator for substream `stream` of `seed`.
pub fn substream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One draw of every channel of the system for a fixed phase configuration.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    /// User–RIS channel, N×K (deterministic).
    pub h1: CMat,
    /// RIS–BS channel, M×N.
    pub h2: CMat,
    /// Direct user–BS channel, M×K.
    pub d: CMat,
    /// Aggregated channel `H₂ΦH₁ + D`, M×K.
    pub q: CMat,
    /// Despread pilot noise, column `k` distributed as CN(0, σ²/(τp)·I_M).
    pub pilot_noise: CMat,
    /// Phase configuration used to build `q`.
    pub phase: PhaseShifts,
}

/// Reusable sampler holding everything that does not change between draws.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    config: SystemConfig,
    los: LosChannels,
    phase: PhaseShifts,
    h1: CMat,
    phi_h1: CMat,
    nlos_scale: f64,
    los_scale: f64,
    gamma_sqrt: Vec<f64>,
    noise_std: f64,
}

impl ChannelSampler {
    pub fn new(config: &SystemConfig, phase: &PhaseShifts) -> Result<Self> {
        config.validate()?;
        if phase.len() != config.n {
            return Err(Error::DimensionMismatch(format!(
                "phase vector has {} entries, config has N={}",
                phase.len(),
                config.n
            )));
        }
        let los = build_los(config);
        let mut h1 = los.hbar.clone();
        for (k, a) in config.alpha.iter().enumerate() {
            h1.column_mut(k).scale_mut(a.sqrt());
        }
        let phi = phase.phi_diag();
        let mut phi_h1 = h1.clone();
        for (mut row, p) in phi_h1.row_iter_mut().zip(phi.iter()) {
            row *= *p;
        }
        Ok(ChannelSampler {
            config: config.clone(),
            phase: phase.clone(),
            h1,
            phi_h1,
            nlos_scale: config.nlos_ris_gain().sqrt(),
            los_scale: config.delta.sqrt(),
            gamma_sqrt: config.gamma.iter().map(|g| g.sqrt()).collect(),
            noise_std: config.pilot_noise_var().sqrt(),
            los,
        })
    }

    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    pub fn los(&self) -> &LosChannels {
        &self.los
    }

    pub fn phase(&self) -> &PhaseShifts {
        &self.phase
    }

    /// `ΦH₁` (N×K).
    pub fn phi_h1(&self) -> &CMat {
        &self.phi_h1
    }

    /// Mean of the aggregated channel, `√(βδ/(δ+1))·a_M a_NᴴΦH₁` (M×K).
    pub fn channel_mean(&self) -> CMat {
        let c = self.config.los_ris_gain().sqrt();
        let row = self.los.a_n.adjoint() * &self.phi_h1;
        (&self.los.a_m * row) * C64::new(c, 0.0)
    }

    /// Draws `H̃₂`, then `D̃`, then the pilot noise, in that order.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ChannelRealization {
        let (m, n, k) = (self.config.m, self.config.n, self.config.k);
        let a_m = &self.los.a_m;
        let a_n = &self.los.a_n;
        let mut h2 = complex_gaussian(m, n, rng);
        for j in 0..n {
            let an = a_n[j].conj() * self.los_scale;
            for i in 0..m {
                h2[(i, j)] = (a_m[i] * an + h2[(i, j)]) * self.nlos_scale;
            }
        }
        let mut d = complex_gaussian(m, k, rng);
        for (mut col, g) in d.column_iter_mut().zip(&self.gamma_sqrt) {
            col.scale_mut(*g);
        }
        let pilot_noise = CMat::from_fn(m, k, |_, _| cn01(rng) * self.noise_std);
        let q = &h2 * &self.phi_h1 + &d;
        ChannelRealization {
            h1: self.h1.clone(),
            h2,
            d,
            q,
            pilot_noise,
            phase: self.phase.clone(),
        }
    }
}

/// One realization, reproducible from `seed`.
pub fn sample_channels(
    config: &SystemConfig,
    phase: &PhaseShifts,
    seed: u64,
) -> Result<ChannelRealization> {
    let sampler = ChannelSampler::new(config, phase)?;
    Ok(sampler.sample(&mut ChaCha8Rng::seed_from_u64(seed)))
}
