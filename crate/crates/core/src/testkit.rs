//! Fixtures shared by unit tests.

use crate::channel::{Angles, SystemConfig};

pub(crate) fn small_config() -> SystemConfig {
    SystemConfig {
        m: 8,
        n: 4,
        k: 2,
        tau_c: 100,
        tau: 2,
        p: 1.0,
        sigma2: 1e-3,
        delta: 1.0,
        beta: 1e-2,
        alpha: vec![1.0, 0.5],
        gamma: vec![0.1, 0.2],
        user_ris_angles: vec![Angles::new(0.3, 1.0), Angles::new(-0.7, 2.0)],
        ris_aod: Angles::new(0.1, 0.4),
        bs_aoa: Angles::new(1.2, 0.9),
        d_over_lambda: 0.5,
        mu: 10.0,
    }
}
