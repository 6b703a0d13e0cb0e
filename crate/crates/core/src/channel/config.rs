use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{CVec, Error, Result, C64};

/// Converts a power in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Azimuth/elevation pair in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Angles {
    pub azimuth: f64,
    pub elevation: f64,
}

impl Angles {
    pub fn new(azimuth: f64, elevation: f64) -> Self {
        Angles { azimuth, elevation }
    }
}

/// Scalar, angle and path-loss parameters of one scenario.
///
/// Powers are stored in watts; conversion from dBm happens once, when a
/// configuration is read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// BS antennas.
    pub m: usize,
    /// RIS elements.
    pub n: usize,
    /// Single-antenna users.
    pub k: usize,
    /// Coherence interval length in slots.
    pub tau_c: usize,
    /// Pilot length in slots.
    pub tau: usize,
    /// Per-user transmit power (W).
    pub p: f64,
    /// Noise power (W).
    pub sigma2: f64,
    /// Rician factor of the RIS–BS link.
    pub delta: f64,
    /// RIS–BS path loss.
    pub beta: f64,
    /// User–RIS path losses.
    pub alpha: Vec<f64>,
    /// User–BS path losses.
    pub gamma: Vec<f64>,
    /// Arrival angles of each user at the RIS.
    pub user_ris_angles: Vec<Angles>,
    /// Departure angles at the RIS towards the BS.
    pub ris_aod: Angles,
    /// Arrival angles at the BS.
    pub bs_aoa: Angles,
    /// Element spacing over wavelength.
    pub d_over_lambda: f64,
    /// Log-sum-exp sharpness for the Max-Min design.
    pub mu: f64,
}

impl SystemConfig {
    /// Checks every structural and positivity constraint.
    ///
    /// `alpha` and `beta` may be zero (RIS switched off); `gamma` must be
    /// strictly positive so that the estimated-channel covariance stays
    /// positive definite.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.k == 0 || self.n == 0 || self.m == 0 {
            return bad(format!(
                "M, N, K must be positive (M={}, N={}, K={})",
                self.m, self.n, self.k
            ));
        }
        if self.k >= self.m {
            return bad(format!("ZF needs K < M (K={}, M={})", self.k, self.m));
        }
        if self.tau < self.k {
            return bad(format!(
                "pilot length tau={} shorter than K={}",
                self.tau, self.k
            ));
        }
        if self.tau >= self.tau_c {
            return bad(format!(
                "pilot length tau={} leaves no data slots in tau_c={}",
                self.tau, self.tau_c
            ));
        }
        if !(self.p > 0.0 && self.p.is_finite()) {
            return bad(format!("transmit power must be positive, got {}", self.p));
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return bad(format!("noise power must be positive, got {}", self.sigma2));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return bad(format!(
                "Rician factor must be finite and nonnegative, got {}",
                self.delta
            ));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be nonnegative, got {}", self.beta));
        }
        if self.d_over_lambda.is_nan() || self.d_over_lambda <= 0.0 {
            return bad(format!(
                "d/lambda must be positive, got {}",
                self.d_over_lambda
            ));
        }
        if self.mu.is_nan() || self.mu <= 0.0 {
            return bad(format!("mu must be positive, got {}", self.mu));
        }
        for (name, len) in [
            ("alpha", self.alpha.len()),
            ("gamma", self.gamma.len()),
            ("user_ris_angles", self.user_ris_angles.len()),
        ] {
            if len != self.k {
                return bad(format!("{name} has {len} entries, expected K={}", self.k));
            }
        }
        if let Some(a) = self.alpha.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
            return bad(format!("alpha entries must be nonnegative, got {a}"));
        }
        if let Some(g) = self.gamma.iter().find(|g| !(**g > 0.0 && g.is_finite())) {
            return bad(format!("gamma entries must be positive, got {g}"));
        }
        Ok(())
    }

    /// Fraction of the coherence interval left for data, `(τ_c − τ)/τ_c`.
    pub fn tau_overhead(&self) -> f64 {
        (self.tau_c - self.tau) as f64 / self.tau_c as f64
    }

    /// Pilot SNR `τp/σ²`.
    pub fn pilot_snr(&self) -> f64 {
        self.tau as f64 * self.p / self.sigma2
    }

    /// `σ²/(τp)`, the pilot noise variance after despreading.
    pub fn pilot_noise_var(&self) -> f64 {
        self.sigma2 / (self.tau as f64 * self.p)
    }

    /// `β/(δ+1)`: NLoS share of the RIS–BS gain.
    pub fn nlos_ris_gain(&self) -> f64 {
        self.beta / (self.delta + 1.0)
    }

    /// `βδ/(δ+1)`: LoS share of the RIS–BS gain.
    pub fn los_ris_gain(&self) -> f64 {
        self.beta * self.delta / (self.delta + 1.0)
    }

    /// Per-antenna variance of the random part of user `k`'s aggregated
    /// channel, `Nα_kβ/(δ+1) + γ_k`.
    pub fn channel_variance(&self, k: usize) -> f64 {
        self.n as f64 * self.alpha[k] * self.nlos_ris_gain() + self.gamma[k]
    }

    /// Same configuration with the RIS switched off (`α = β = 0`).
    pub fn without_ris(&self) -> Self {
        SystemConfig {
            beta: 0.0,
            alpha: vec![0.0; self.k],
            ..self.clone()
        }
    }
}

/// RIS reflection vector `v` with `Φ = diag{vᴴ}`, i.e. `v_n = e^{−jθ_n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShifts {
    v: CVec,
}

impl PhaseShifts {
    /// Phases `θ_n` of `Φ = diag{e^{jθ₁}, …}`.
    pub fn from_thetas(thetas: &[f64]) -> Self {
        PhaseShifts {
            v: CVec::from_iterator(
                thetas.len(),
                thetas.iter().map(|t| C64::from_polar(1.0, -t)),
            ),
        }
    }

    /// `Φ = I_N`.
    pub fn identity(n: usize) -> Self {
        PhaseShifts {
            v: CVec::from_element(n, C64::new(1.0, 0.0)),
        }
    }

    /// Uniform random phases on `[0, 2π)`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let thetas: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * TAU).collect();
        Self::from_thetas(&thetas)
    }

    /// Wraps an already unit-modulus vector; entries are renormalized.
    pub fn from_vector(v: CVec) -> Result<Self> {
        if let Some(z) = v.iter().find(|z| (z.norm() - 1.0).abs() > 1e-9) {
            return Err(Error::InvalidConfig(format!(
                "phase entry {z} is not unit modulus"
            )));
        }
        Ok(PhaseShifts {
            v: v.map(|z| z / z.norm()),
        })
    }

    /// `exp{j∠c}` elementwise; entries where `c` vanishes keep the phase of `fallback`.
    pub fn project(c: &CVec, fallback: &PhaseShifts) -> Self {
        let v = CVec::from_iterator(
            c.len(),
            c.iter().zip(fallback.v.iter()).map(|(z, f)| {
                let r = z.norm();
                if r > 0.0 && r.is_finite() {
                    z / r
                } else {
                    *f
                }
            }),
        );
        PhaseShifts { v }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// The vector `v`.
    pub fn v(&self) -> &CVec {
        &self.v
    }

    /// Diagonal of `Φ` (that is, `v*`).
    pub fn phi_diag(&self) -> CVec {
        self.v.map(|z| z.conj())
    }

    /// Phases `θ_n ∈ [0, 2π)`.
    pub fn thetas(&self) -> Vec<f64> {
        self.v.iter().map(|z| (-z.arg()).rem_euclid(TAU)).collect()
    }

    /// Applies a global phase rotation `Φ → e^{jc}Φ`.
    pub fn rotated(&self, c: f64) -> Self {
        let r = C64::from_polar(1.0, -c);
        PhaseShifts {
            v: self.v.map(|z| z * r),
        }
    }

    /// Largest deviation of `|v_n|` from one.
    pub fn modulus_error(&self) -> f64 {
        self.v
            .iter()
            .map(|z| (z.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}
