//! Deployment helper turning positions into path losses.
//!
//! The layout places the BS at the origin, the RIS 700 m away along y, and
//! the users on a 10 m ring next to the RIS. Angles of arrival/departure are
//! not derived from the positions; they are drawn uniformly on `[0, 2π)`
//! from the layout seed. The path-loss constants below are illustrative
//! defaults and are not calibrated against any measurement campaign; every
//! value can be overridden in a scenario file.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{db_to_linear, dbm_to_watts, Angles, SystemConfig};

/// Seed used to place the users of the default layout.
pub const DEFAULT_PROFILE_SEED: u64 = 0;

/// Distance-based path loss `L₀·d^{−η}` per link type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossModel {
    /// Loss at 1 m in dB (negative).
    pub reference_db: f64,
    pub user_ris_exponent: f64,
    pub ris_bs_exponent: f64,
    pub user_bs_exponent: f64,
}

impl Default for PathLossModel {
    fn default() -> Self {
        PathLossModel {
            reference_db: -30.0,
            user_ris_exponent: 2.0,
            ris_bs_exponent: 2.1,
            user_bs_exponent: 3.6,
        }
    }
}

impl PathLossModel {
    pub fn gain(&self, exponent: f64, distance: f64) -> f64 {
        db_to_linear(self.reference_db) * distance.powf(-exponent)
    }
}

/// 3-D positions of the BS, the RIS and the users (metres), plus link angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeploymentGeometry {
    pub bs: [f64; 3],
    pub ris: [f64; 3],
    pub users: Vec<[f64; 3]>,
    pub user_ris_angles: Vec<Angles>,
    pub ris_aod: Angles,
    pub bs_aoa: Angles,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

impl DeploymentGeometry {
    /// BS at the origin, RIS at (0, 700) mounted 10 m high, `k` users at
    /// uniformly random positions on the ring of radius 10 m centred at
    /// (10, 700). Users are sorted nearest-to-RIS first. After the positions,
    /// the same generator draws each user's (azimuth, elevation), then the
    /// RIS departure pair, then the BS arrival pair.
    pub fn ring(k: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ris = [0.0, 700.0, 10.0];
        let mut users: Vec<[f64; 3]> = (0..k)
            .map(|_| {
                let t = rng.random::<f64>() * TAU;
                [10.0 + 10.0 * t.cos(), 700.0 + 10.0 * t.sin(), 0.0]
            })
            .collect();
        users.sort_by(|a, b| norm(sub(*a, ris)).total_cmp(&norm(sub(*b, ris))));
        let mut angle = || Angles::new(rng.random::<f64>() * TAU, rng.random::<f64>() * TAU);
        let user_ris_angles = (0..k).map(|_| angle()).collect();
        let ris_aod = angle();
        let bs_aoa = angle();
        DeploymentGeometry {
            bs: [0.0, 0.0, 0.0],
            ris,
            users,
            user_ris_angles,
            ris_aod,
            bs_aoa,
        }
    }

    pub fn user_ris_distance(&self, k: usize) -> f64 {
        norm(sub(self.users[k], self.ris))
    }

    pub fn user_bs_distance(&self, k: usize) -> f64 {
        norm(sub(self.users[k], self.bs))
    }

    pub fn ris_bs_distance(&self) -> f64 {
        norm(sub(self.ris, self.bs))
    }

    /// Overwrites `K`, path losses and angles of `config` from this layout.
    pub fn apply(&self, model: &PathLossModel, config: &mut SystemConfig) {
        let k = self.users.len();
        config.k = k;
        config.beta = model.gain(model.ris_bs_exponent, self.ris_bs_distance());
        config.alpha = (0..k)
            .map(|i| model.gain(model.user_ris_exponent, self.user_ris_distance(i)))
            .collect();
        config.gamma = (0..k)
            .map(|i| model.gain(model.user_bs_exponent, self.user_bs_distance(i)))
            .collect();
        config.user_ris_angles = self.user_ris_angles.clone();
        config.ris_aod = self.ris_aod;
        config.bs_aoa = self.bs_aoa;
    }
}

impl SystemConfig {
    /// Reference scenario: K = 8, M = N = 64, δ = 1, τ_c = 196, τ = K,
    /// p = 30 dBm, σ² = −104 dBm, μ = 10, half-wavelength spacing, with
    /// path losses and angles from [`DeploymentGeometry::ring`] and the
    /// default [`PathLossModel`].
    pub fn reference() -> Self {
        let k = 8;
        let mut cfg = SystemConfig {
            m: 64,
            n: 64,
            k,
            tau_c: 196,
            tau: k,
            p: dbm_to_watts(30.0),
            sigma2: dbm_to_watts(-104.0),
            delta: 1.0,
            beta: 0.0,
            alpha: Vec::new(),
            gamma: Vec::new(),
            user_ris_angles: Vec::new(),
            ris_aod: Angles::new(0.0, 0.0),
            bs_aoa: Angles::new(0.0, 0.0),
            d_over_lambda: 0.5,
            mu: 10.0,
        };
        DeploymentGeometry::ring(k, DEFAULT_PROFILE_SEED)
            .apply(&PathLossModel::default(), &mut cfg);
        cfg
    }
}
