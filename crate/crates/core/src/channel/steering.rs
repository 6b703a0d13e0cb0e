use std::f64::consts::{PI, TAU};

use super::{Angles, PhaseShifts, SystemConfig};
use crate::{CMat, CVec, C64};

/// Factor pair `(L_x, L_y)` of `l` with `L_x ≤ L_y` and the smallest gap.
///
/// # Panics
/// If `l == 0`.
pub fn decompose_grid(l: usize) -> (usize, usize) {
    assert!(l >= 1, "grid size must be positive");
    let mut lx = (l as f64).sqrt() as usize;
    // guard against sqrt rounding either way
    while lx * lx > l {
        lx -= 1;
    }
    while (lx + 1) * (lx + 1) <= l {
        lx += 1;
    }
    while !l.is_multiple_of(lx) {
        lx -= 1;
    }
    (lx, l / lx)
}

/// Direction cosines `(sin(el)·sin(az), cos(el))` scaled by `2π d/λ`.
fn phase_rates(angles: Angles, d_over_lambda: f64) -> (f64, f64) {
    let k = TAU * d_over_lambda;
    (
        k * angles.elevation.sin() * angles.azimuth.sin(),
        k * angles.elevation.cos(),
    )
}

/// URA response: element `l` (0-based) sits at row `⌊l/L_y⌋`, column `l mod L_y`.
pub fn steering_vector(l: usize, angles: Angles, d_over_lambda: f64) -> CVec {
    let (_, ly) = decompose_grid(l);
    let (px, py) = phase_rates(angles, d_over_lambda);
    CVec::from_iterator(
        l,
        (0..l).map(|i| {
            let x = (i / ly) as f64;
            let y = (i % ly) as f64;
            C64::from_polar(1.0, x * px + y * py)
        }),
    )
}

/// `Σ_{x=0}^{L−1} e^{jxφ}` in closed form.
fn geometric_sum(len: usize, phi: f64) -> C64 {
    let phi = PI - (PI - phi).rem_euclid(TAU);
    if phi == 0.0 {
        return C64::new(len as f64, 0.0);
    }
    let l = len as f64;
    let half = 0.5 * phi;
    let mag = (l * half).sin() / half.sin();
    C64::from_polar(1.0, (l - 1.0) * half) * mag
}

/// `a(first)ᴴ a(second)` for two length-`l` steering vectors, in O(1).
pub fn steering_inner(l: usize, first: Angles, second: Angles, d_over_lambda: f64) -> C64 {
    let (lx, ly) = decompose_grid(l);
    let (px1, py1) = phase_rates(first, d_over_lambda);
    let (px2, py2) = phase_rates(second, d_over_lambda);
    geometric_sum(lx, px2 - px1) * geometric_sum(ly, py2 - py1)
}

/// Deterministic line-of-sight quantities of a configuration.
#[derive(Debug, Clone)]
pub struct LosChannels {
    /// Columns are the user steering vectors `h̄_k` at the RIS (N×K).
    pub hbar: CMat,
    /// BS arrival steering vector `a_M`.
    pub a_m: CVec,
    /// RIS departure steering vector `a_N`.
    pub a_n: CVec,
}

impl LosChannels {
    /// Rank-one LoS part of the RIS–BS channel, `a_M a_Nᴴ`.
    pub fn hbar2(&self) -> CMat {
        &self.a_m * self.a_n.adjoint()
    }

    /// `a_Nᴴ Φ h̄_k` for every user.
    pub fn los_products(&self, phase: &PhaseShifts) -> Vec<C64> {
        let v = phase.v();
        (0..self.hbar.ncols())
            .map(|k| {
                self.hbar
                    .column(k)
                    .iter()
                    .zip(self.a_n.iter())
                    .zip(v.iter())
                    .map(|((h, a), v)| a.conj() * v.conj() * h)
                    .sum()
            })
            .collect()
    }
}

/// Steering vectors for every link of `config`.
pub fn build_los(config: &SystemConfig) -> LosChannels {
    let n = config.n;
    let d = config.d_over_lambda;
    let mut hbar = CMat::zeros(n, config.k);
    for (k, ang) in config.user_ris_angles.iter().enumerate() {
        hbar.set_column(k, &steering_vector(n, *ang, d));
    }
    LosChannels {
        hbar,
        a_m: steering_vector(config.m, config.bs_aoa, d),
        a_n: steering_vector(config.n, config.ris_aod, d),
    }
}
