#![allow(dead_code)]

use std::f64::consts::TAU;

use rand::Rng;
use rislab::channel::{Angles, SystemConfig};

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.random_range(lo.log10()..hi.log10()))
}

fn angles<R: Rng>(rng: &mut R) -> Angles {
    Angles::new(rng.random::<f64>() * TAU, rng.random::<f64>() * TAU)
}

/// Configuration with `K` in `k_range`, `N` in `n_range` and path losses,
/// powers and angles drawn over several decades.
pub fn random_config<R: Rng>(
    rng: &mut R,
    k_range: std::ops::RangeInclusive<usize>,
    n_range: std::ops::RangeInclusive<usize>,
) -> SystemConfig {
    let k = rng.random_range(k_range);
    let n = rng.random_range(n_range);
    let tau = k + rng.random_range(0..=4);
    SystemConfig {
        m: k + rng.random_range(1..=64),
        n,
        k,
        tau_c: tau + rng.random_range(1..=200),
        tau,
        p: log_uniform(rng, 1e-2, 10.0),
        sigma2: log_uniform(rng, 1e-3, 1.0),
        delta: rng.random_range(0.0..10.0),
        beta: log_uniform(rng, 1e-3, 1.0),
        alpha: (0..k).map(|_| log_uniform(rng, 1e-3, 1.0)).collect(),
        gamma: (0..k).map(|_| log_uniform(rng, 1e-3, 1.0)).collect(),
        user_ris_angles: (0..k).map(|_| angles(rng)).collect(),
        ris_aod: angles(rng),
        bs_aoa: angles(rng),
        d_over_lambda: 0.5,
        mu: 10.0,
    }
}

pub fn min_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
