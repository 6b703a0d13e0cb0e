use super::eigen::power_iteration;
use crate::channel::{build_los, SystemConfig};
use crate::estimation::compute_statistics;
use crate::{CMat, CVec, Error, Result, C64};

/// Tolerance of the cached `λ_max(C_k + B)` computation.
pub const LAMBDA_TOL: f64 = 1e-8;

/// Fractional form of the per-user rate bound in the phase vector `v`:
/// `f_k(v) = ln(1 + vᴴBv / vᴴC_kv)` with
///
/// - `B = I/N + c·WΛ⁻¹Wᴴ`, `W = diag{a_Nᴴ}H₁`, `c = βδ/(δ+1)`,
/// - `C_k = s·([Λ⁻¹]_kk·B − c·z_k z_kᴴ)`, `z_k = WΛ⁻¹e_k`,
/// - `s = (pΣε + σ²)/(p(M−K))`.
///
/// All products go through the N×K factor `W`, so nothing N×N is stored.
#[derive(Debug, Clone)]
pub struct FractionalProblem {
    n: usize,
    k: usize,
    c: f64,
    w: CMat,
    lambda_inv: CMat,
    z: CMat,
    scale: f64,
    tau_overhead: f64,
    mu: f64,
    lambda_max: Vec<f64>,
}

/// Inner products needed to evaluate every `f_k` at one point.
#[derive(Debug, Clone)]
pub struct Evaluation {
    /// `vᴴBv`.
    pub vbv: f64,
    /// `vᴴC_kv` per user.
    pub vcv: Vec<f64>,
    /// `f_k(v)` per user (nats).
    pub values: Vec<f64>,
}

pub fn build_problem(config: &SystemConfig) -> Result<FractionalProblem> {
    let stats = compute_statistics(config)?;
    let los = build_los(config);
    let (n, k) = (config.n, config.k);
    let w = CMat::from_fn(n, k, |i, j| {
        los.a_n[i].conj() * los.hbar[(i, j)] * config.alpha[j].sqrt()
    });
    let z = &w * &stats.lambda_inv;
    let scale =
        (config.p * stats.epsilon_sum() + config.sigma2) / (config.p * (config.m - k) as f64);
    let mut problem = FractionalProblem {
        n,
        k,
        c: config.los_ris_gain(),
        w,
        lambda_inv: stats.lambda_inv,
        z,
        scale,
        tau_overhead: config.tau_overhead(),
        mu: config.mu,
        lambda_max: Vec::new(),
    };
    problem.lambda_max = (0..k)
        .map(|i| {
            let e = power_iteration(
                n,
                |x| problem.c_apply(i, x) + problem.b_apply(x),
                0.0,
                |l| l,
                LAMBDA_TOL,
            )?;
            // Rayleigh quotient plus residual bounds the top eigenvalue from above.
            Ok(e.value + e.residual)
        })
        .collect::<Result<_>>()?;
    Ok(problem)
}

impl FractionalProblem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn tau_overhead(&self) -> f64 {
        self.tau_overhead
    }

    /// Cached upper estimate of `λ_max(C_k + B)`.
    pub fn lambda_max(&self, k: usize) -> f64 {
        self.lambda_max[k]
    }

    /// `z_k`.
    pub fn z(&self, k: usize) -> CVec {
        self.z.column(k).into()
    }

    fn check(&self, v: &CVec) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "vector has {} entries, N={}",
                v.len(),
                self.n
            )));
        }
        Ok(())
    }

    /// `Bv`.
    pub fn b_apply(&self, v: &CVec) -> CVec {
        let u = self.w.adjoint() * v;
        let t = &self.lambda_inv * u;
        v / C64::new(self.n as f64, 0.0) + (&self.w * t) * C64::new(self.c, 0.0)
    }

    /// `C_kv`.
    pub fn c_apply(&self, k: usize, v: &CVec) -> CVec {
        let zv = self.z.column(k).dotc(v);
        let bv = self.b_apply(v);
        (bv * C64::new(self.lambda_inv[(k, k)].re, 0.0) - self.z.column(k) * (zv * self.c))
            * C64::new(self.scale, 0.0)
    }

    /// Dense `B` (N×N).
    pub fn b_matrix(&self) -> CMat {
        let mut b = &self.w * &self.lambda_inv * self.w.adjoint() * C64::new(self.c, 0.0);
        for i in 0..self.n {
            b[(i, i)] += C64::new(1.0 / self.n as f64, 0.0);
        }
        b
    }

    /// Dense `C_k` (N×N).
    pub fn c_matrix(&self, k: usize) -> CMat {
        let z = self.z.column(k);
        (self.b_matrix() * C64::new(self.lambda_inv[(k, k)].re, 0.0)
            - z * z.adjoint() * C64::new(self.c, 0.0))
            * C64::new(self.scale, 0.0)
    }

    /// Evaluates `vᴴBv`, every `vᴴC_kv` and every `f_k(v)` with one pass over `W`.
    pub fn evaluate(&self, v: &CVec) -> Result<Evaluation> {
        self.check(v)?;
        let u = self.w.adjoint() * v;
        let t = &self.lambda_inv * &u;
        let vbv = v.norm_squared() / self.n as f64 + self.c * u.dotc(&t).re;
        let mut vcv = Vec::with_capacity(self.k);
        let mut values = Vec::with_capacity(self.k);
        for k in 0..self.k {
            let q = self.scale * (self.lambda_inv[(k, k)].re * vbv - self.c * t[k].norm_sqr());
            if q.is_nan() || q <= 0.0 {
                return Err(Error::Degenerate(format!(
                    "v^H C_{k} v = {q} is not positive"
                )));
            }
            vcv.push(q);
            values.push((vbv / q).ln_1p());
        }
        Ok(Evaluation { vbv, vcv, values })
    }

    /// `f_k(v)` for every user, in nats.
    pub fn values(&self, v: &CVec) -> Result<Vec<f64>> {
        Ok(self.evaluate(v)?.values)
    }

    /// Per-user rates in bits/s/Hz, `τ°·f_k(v)/ln 2`.
    pub fn rates(&self, v: &CVec) -> Result<Vec<f64>> {
        Ok(self
            .values(v)?
            .into_iter()
            .map(|f| self.tau_overhead * f / std::f64::consts::LN_2)
            .collect())
    }
}
