use crate::channel::{build_los, LosChannels, PhaseShifts, SystemConfig};
use crate::estimation::{compute_statistics, ChannelStatistics};
use crate::linalg::cholesky;
use crate::{CMat, CVec, Error, Result, C64};

/// `τ°·log₂(1 + snr)`.
pub fn rate_from_snr(tau_overhead: f64, snr: f64) -> f64 {
    tau_overhead * snr.ln_1p() / std::f64::consts::LN_2
}

/// Statistics and LoS geometry needed by every closed-form rate expression.
#[derive(Debug, Clone)]
pub struct RateModel {
    config: SystemConfig,
    stats: ChannelStatistics,
    los: LosChannels,
}

impl RateModel {
    pub fn new(config: &SystemConfig) -> Result<Self> {
        let stats = compute_statistics(config)?;
        Ok(RateModel {
            config: config.clone(),
            stats,
            los: build_los(config),
        })
    }

    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    pub fn stats(&self) -> &ChannelStatistics {
        &self.stats
    }

    pub fn los(&self) -> &LosChannels {
        &self.los
    }

    /// `p(M−K)/(pΣε + σ²)`.
    pub fn snr_prefactor(&self) -> f64 {
        let c = &self.config;
        c.p * (c.m - c.k) as f64 / (c.p * self.stats.epsilon_sum() + c.sigma2)
    }

    fn check_phase(&self, phase: &PhaseShifts) -> Result<()> {
        if phase.len() != self.config.n {
            return Err(Error::DimensionMismatch(format!(
                "phase vector has {} entries, config has N={}",
                phase.len(),
                self.config.n
            )));
        }
        Ok(())
    }

    /// `g = H₁ᴴΦᴴa_N`, i.e. `g_k = √α_k·(a_NᴴΦh̄_k)*`.
    pub fn los_vector(&self, phase: &PhaseShifts) -> Result<CVec> {
        self.check_phase(phase)?;
        let t = self.los.los_products(phase);
        Ok(CVec::from_iterator(
            self.config.k,
            t.iter()
                .zip(&self.config.alpha)
                .map(|(t, a)| t.conj() * a.sqrt()),
        ))
    }

    /// Per-user SNR of the lower bound
    /// `p(M−K) / ((pΣε + σ²)·[(Λ + (βδ/(δ+1))·ggᴴ)⁻¹]_kk)`.
    pub fn lower_bound_snr(&self, phase: &PhaseShifts) -> Result<Vec<f64>> {
        let g = self.los_vector(phase)?;
        let c = self.config.los_ris_gain();
        let mat = &self.stats.lambda + (&g * g.adjoint()) * C64::new(c, 0.0);
        let chol = cholesky(&mat, "Lambda + LoS term")?;
        let pre = self.snr_prefactor();
        let k = self.config.k;
        let mut e = CVec::zeros(k);
        Ok((0..k)
            .map(|i| {
                e.fill(C64::new(0.0, 0.0));
                e[i] = C64::new(1.0, 0.0);
                let x = chol.solve(&e);
                pre / x[i].re
            })
            .collect())
    }

    pub fn lower_bound(&self, phase: &PhaseShifts) -> Result<Vec<f64>> {
        Ok(self.rates(&self.lower_bound_snr(phase)?))
    }

    /// Phase-independent SNR bound using `[Λ⁻¹]_kk`.
    pub fn lb2_snr(&self) -> Vec<f64> {
        let pre = self.snr_prefactor();
        (0..self.config.k)
            .map(|i| pre / self.stats.lambda_inv[(i, i)].re)
            .collect()
    }

    /// Diagonal approximation `x_k²/(x_k + σ²/(τp))` of the phase-independent bound.
    pub fn lb2_approx_snr(&self) -> Vec<f64> {
        let pre = self.snr_prefactor();
        let s = self.stats.noise;
        self.stats
            .variance
            .iter()
            .map(|x| pre * x * x / (x + s))
            .collect()
    }

    pub fn lb2(&self) -> Vec<f64> {
        self.rates(&self.lb2_snr())
    }

    pub fn lb2_approx(&self) -> Vec<f64> {
        self.rates(&self.lb2_approx_snr())
    }

    /// Upper-bound SNRs: with `|a_NᴴΦh̄_k|²`, and with its maximum `N²`.
    pub fn upper_bound_snr(&self, phase: &PhaseShifts) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_phase(phase)?;
        let cfg = &self.config;
        let pre = self.snr_prefactor();
        let s = self.stats.noise;
        let t = self.los.los_products(phase);
        let n2 = (cfg.n as f64).powi(2);
        let c = cfg.los_ris_gain();
        let (mut general, mut aligned) = (Vec::with_capacity(cfg.k), Vec::with_capacity(cfg.k));
        for k in 0..cfg.k {
            let x = self.stats.variance[k];
            let base = x * x / (x + s);
            general.push(pre * (base + t[k].norm_sqr() * cfg.alpha[k] * c));
            aligned.push(pre * (base + n2 * cfg.alpha[k] * c));
        }
        Ok((general, aligned))
    }

    pub fn upper_bound(&self, phase: &PhaseShifts) -> Result<(Vec<f64>, Vec<f64>)> {
        let (g, a) = self.upper_bound_snr(phase)?;
        Ok((self.rates(&g), self.rates(&a)))
    }

    fn rates(&self, snr: &[f64]) -> Vec<f64> {
        let t = self.config.tau_overhead();
        snr.iter().map(|s| rate_from_snr(t, *s)).collect()
    }
}

/// Closed-form lower bound on the ergodic rate of every user.
pub fn lower_bound_rates(config: &SystemConfig, phase: &PhaseShifts) -> Result<Vec<f64>> {
    RateModel::new(config)?.lower_bound(phase)
}

/// Phase-independent bound, exact and diagonal-approximated.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseFreeBound {
    pub exact: Vec<f64>,
    pub approx: Vec<f64>,
}

pub fn lb2_phi_independent(config: &SystemConfig) -> Result<PhaseFreeBound> {
    let model = RateModel::new(config)?;
    Ok(PhaseFreeBound {
        exact: model.lb2(),
        approx: model.lb2_approx(),
    })
}

/// `(general, aligned)` upper bounds per user.
pub fn upper_bound(config: &SystemConfig, phase: &PhaseShifts) -> Result<(Vec<f64>, Vec<f64>)> {
    RateModel::new(config)?.upper_bound(phase)
}

/// Lower bound of a conventional massive MIMO system (RIS switched off).
pub fn rate_no_ris(config: &SystemConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let c = config;
    let snr_p = c.pilot_snr();
    let s = c.pilot_noise_var();
    let est: f64 = c.gamma.iter().map(|g| 1.0 / (snr_p + 1.0 / g)).sum();
    let pre = c.p * (c.m - c.k) as f64 / (c.p * est + c.sigma2);
    Ok(c.gamma
        .iter()
        .map(|g| rate_from_snr(c.tau_overhead(), pre * g * g / (g + s)))
        .collect())
}

/// Limiting SNR under `p = E_u/N` as `N → ∞`, and its diagonal lower bound.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerScalingLimit {
    pub snr: Vec<f64>,
    pub snr_lower: Vec<f64>,
}

impl PowerScalingLimit {
    pub fn rates(&self, tau_overhead: f64) -> (Vec<f64>, Vec<f64>) {
        (
            self.snr
                .iter()
                .map(|s| rate_from_snr(tau_overhead, *s))
                .collect(),
            self.snr_lower
                .iter()
                .map(|s| rate_from_snr(tau_overhead, *s))
                .collect(),
        )
    }
}

pub fn power_scaling_limit(
    config: &SystemConfig,
    phase: &PhaseShifts,
    e_u: f64,
) -> Result<PowerScalingLimit> {
    if !(e_u > 0.0 && e_u.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "E_u must be positive, got {e_u}"
        )));
    }
    let mut cfg = config.clone();
    cfg.p = e_u / config.n as f64;
    cfg.validate()?;
    if cfg.beta <= 0.0 || cfg.alpha.iter().any(|a| *a <= 0.0) {
        return Err(Error::InvalidConfig(
            "power scaling limit needs a nonzero cascaded link".into(),
        ));
    }
    let k = cfg.k;
    let tau = cfg.tau as f64;
    let s = cfg.sigma2 / (tau * e_u);
    let y: Vec<f64> = cfg.alpha.iter().map(|a| a * cfg.nlos_ris_gain()).collect();
    let diag: Vec<f64> = y.iter().map(|y| y * y / (y + s)).collect();
    let interference: f64 = y
        .iter()
        .map(|y| e_u / (tau * e_u / cfg.sigma2 + 1.0 / y))
        .sum();
    let pre = e_u * (cfg.m - k) as f64 / (interference + cfg.sigma2);

    let model = RateModel {
        stats: compute_statistics(&cfg)?,
        los: build_los(&cfg),
        config: cfg,
    };
    let g = model.los_vector(phase)?;
    let c = model.config.los_ris_gain() / model.config.n as f64;
    let xi = CMat::from_fn(k, k, |i, j| {
        let d = if i == j { diag[i] } else { 0.0 };
        C64::new(d, 0.0) + g[i] * g[j].conj() * c
    });
    let inv = cholesky(&xi, "Xi")?.inverse();
    Ok(PowerScalingLimit {
        snr: (0..k).map(|i| pre / inv[(i, i)].re).collect(),
        snr_lower: diag.iter().map(|d| pre * d).collect(),
    })
}

/// Antennas needed for user `k` to reach SNR `c0` with `n` RIS elements,
/// assuming a Rayleigh RIS–BS link (δ = 0) and saturated estimation error.
pub fn required_antennas(config: &SystemConfig, n: usize, c0: f64, k: usize) -> f64 {
    let c = config;
    let tau = c.tau as f64;
    c0 * (c.k as f64 + tau) * c.sigma2 / (tau * c.p * (n as f64 * c.alpha[k] * c.beta + c.gamma[k]))
        + c.k as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Angles;
    use crate::testkit::small_config;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dense_inverse_oracle() {
        let cfg = small_config();
        let model = RateModel::new(&cfg).unwrap();
        let phase = PhaseShifts::from_thetas(&[0.4, 2.0, 5.5, 1.0]);
        let los = build_los(&cfg);
        // H₁ᴴΦᴴa_N built from full matrices
        let mut h1 = los.hbar.clone();
        for k in 0..cfg.k {
            h1.column_mut(k).scale_mut(cfg.alpha[k].sqrt());
        }
        let phi = CMat::from_diagonal(&phase.phi_diag());
        let g = h1.adjoint() * phi.adjoint() * &los.a_n;
        let mat = &model.stats().lambda + &g * g.adjoint() * C64::new(cfg.los_ris_gain(), 0.0);
        let inv = mat.try_inverse().unwrap();
        let pre = model.snr_prefactor();
        let got = model.lower_bound(&phase).unwrap();
        for k in 0..cfg.k {
            let want = cfg.tau_overhead() * (1.0 + pre / inv[(k, k)].re).log2();
            assert!((got[k] - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn global_phase_invariance() {
        let cfg = small_config();
        let model = RateModel::new(&cfg).unwrap();
        let p = PhaseShifts::from_thetas(&[0.4, 2.0, 5.5, 1.0]);
        let a = model.lower_bound(&p).unwrap();
        let b = model.lower_bound(&p.rotated(0.77)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-13 * x);
        }
    }

    #[test]
    fn no_ris_is_the_zero_path_loss_case() {
        let cfg = small_config().without_ris();
        let direct = rate_no_ris(&cfg).unwrap();
        let general = lower_bound_rates(&cfg, &PhaseShifts::identity(cfg.n)).unwrap();
        for (a, b) in direct.iter().zip(&general) {
            assert!((a - b).abs() <= 1e-14 * a);
        }
    }

    #[test]
    fn conventional_power_scaling() {
        let mut cfg = small_config();
        cfg.m = 100_000_000;
        let e_u = 0.01;
        cfg.p = e_u / (cfg.m as f64).sqrt();
        let rates = rate_no_ris(&cfg).unwrap();
        for (k, r) in rates.iter().enumerate() {
            let snr = cfg.tau as f64 * e_u * e_u * cfg.gamma[k].powi(2) / cfg.sigma2.powi(2);
            let want = rate_from_snr(cfg.tau_overhead(), snr);
            assert!((r / want - 1.0).abs() < 1e-3, "{r} vs {want}");
        }
    }

    #[test]
    fn vanishing_power_gives_vanishing_rate() {
        let mut cfg = small_config();
        cfg.m = cfg.k + 1;
        let mut last = f64::INFINITY;
        for e in [1e-3, 1e-5, 1e-7, 1e-9] {
            cfg.p = e;
            let r = rate_no_ris(&cfg).unwrap()[0];
            assert!(r > 0.0 && r < last);
            last = r;
        }
        assert!(last < 1e-6);
    }

    #[test]
    fn rayleigh_link_power_limit_is_diagonal() {
        let mut cfg = small_config();
        cfg.delta = 0.0;
        let lim = power_scaling_limit(&cfg, &PhaseShifts::identity(cfg.n), 1.0).unwrap();
        for (a, b) in lim.snr.iter().zip(&lim.snr_lower) {
            assert!((a - b).abs() <= 4.0 * f64::EPSILON * b);
        }
    }

    #[test]
    fn symmetric_power_limit_scalar_check() {
        // two identical users; Ξ = d·I + (c/N)·ggᴴ with |g_1| = |g_2|
        let mut cfg = small_config();
        cfg.alpha = vec![0.5, 0.5];
        cfg.user_ris_angles = vec![Angles::new(0.3, 1.0), Angles::new(0.3, 1.0)];
        let e_u = 2.0;
        let phase = PhaseShifts::identity(cfg.n);
        let lim = power_scaling_limit(&cfg, &phase, e_u).unwrap();
        let tau = cfg.tau as f64;
        let y = 0.5 * cfg.beta / (cfg.delta + 1.0);
        let s = cfg.sigma2 / (tau * e_u);
        let d = y * y / (y + s);
        let t = build_los(&cfg).los_products(&phase)[0].norm_sqr();
        let a = cfg.los_ris_gain() * 0.5 * t / cfg.n as f64;
        // [(dI + a·11ᵀ)⁻¹]_11 = (d + a)/(d(d + 2a))
        let inv11 = (d + a) / (d * (d + 2.0 * a));
        let pre = e_u * (cfg.m - 2) as f64
            / (2.0 * e_u / (tau * e_u / cfg.sigma2 + 1.0 / y) + cfg.sigma2);
        assert!((lim.snr[0] / (pre / inv11) - 1.0).abs() < 1e-12);
        assert!((lim.snr_lower[0] / (pre * d) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn required_antennas_identities() {
        let mut cfg = small_config();
        cfg.delta = 0.0;
        let prod = |n: usize| {
            (required_antennas(&cfg, n, 5.0, 0) - cfg.k as f64)
                * (n as f64 * cfg.alpha[0] * cfg.beta + cfg.gamma[0])
        };
        let p0 = prod(16);
        for n in [32, 100, 1000] {
            assert!((prod(n) / p0 - 1.0).abs() < 1e-13);
        }
        let big = required_antennas(&cfg, usize::MAX / 2, 5.0, 0);
        assert!((big - cfg.k as f64).abs() < 1e-9);
    }

    #[test]
    fn sandwich_on_random_phases() {
        let cfg = small_config();
        let model = RateModel::new(&cfg).unwrap();
        let lb2 = model.lb2();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let p = PhaseShifts::random(cfg.n, &mut rng);
            let lb = model.lower_bound(&p).unwrap();
            let (ub, ub_a) = model.upper_bound(&p).unwrap();
            for k in 0..cfg.k {
                assert!(lb2[k] <= lb[k] * (1.0 + 1e-12));
                assert!(lb[k] <= ub[k] * (1.0 + 1e-12));
                assert!(ub[k] <= ub_a[k] * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn monotone_in_antennas_and_power() {
        let cfg = small_config();
        let p = PhaseShifts::from_thetas(&[0.4, 2.0, 5.5, 1.0]);
        let base = lower_bound_rates(&cfg, &p).unwrap();
        let mut more_m = cfg.clone();
        more_m.m += 1;
        let mut more_p = cfg.clone();
        more_p.p *= 1.01;
        for other in [more_m, more_p] {
            let r = lower_bound_rates(&other, &p).unwrap();
            for k in 0..cfg.k {
                assert!(r[k] >= base[k]);
            }
        }
    }
}
