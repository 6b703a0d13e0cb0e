use serde::{Deserialize, Serialize};

use super::problem::{build_problem, FractionalProblem};
use crate::channel::{PhaseShifts, SystemConfig};
use crate::{CVec, Error, Result, C64};

/// Design criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// Maximize `Σ_k f_k`.
    Sum,
    /// Maximize `min_k f_k` through its log-sum-exp smoothing.
    Min,
}

/// Linear minorizer `f_k(v) ≥ const_k + 2Re{f_kᴴv}` on the unit-modulus set,
/// tight at the expansion point.
#[derive(Debug, Clone)]
pub struct Surrogate {
    pub consts: Vec<f64>,
    pub grads: Vec<CVec>,
    pub omega: Vec<f64>,
    pub psi: Vec<f64>,
    /// `f_k` at the expansion point.
    pub values: Vec<f64>,
}

impl Surrogate {
    /// `const_k + 2Re{f_kᴴv}`.
    pub fn eval(&self, k: usize, v: &CVec) -> f64 {
        self.consts[k] + 2.0 * self.grads[k].dotc(v).re
    }
}

fn check_unit_modulus(v: &CVec) -> Result<()> {
    match v.iter().find(|z| (z.norm() - 1.0).abs() > 1e-9) {
        Some(z) => Err(Error::InvalidConfig(format!(
            "entry {z} is not unit modulus"
        ))),
        None => Ok(()),
    }
}

/// Expands every `f_k` around `v_n`.
///
/// With `λ_k ≥ λ_max(C_k + B)`, `ω = 1/v_nᴴCv_n` and
/// `ψ = v_nᴴBv_n / (v_nᴴCv_n·(v_nᴴCv_n + v_nᴴBv_n))`:
/// `f_k = ωBv_n − ψ(C_k + B − λ_kI)v_n` and
/// `const_k = f_k(v_n) − v_nᴴBv_n/v_nᴴCv_n − ψ·v_nᴴ(λ_kI − C_k − B)v_n − Nψλ_k`.
pub fn surrogate(problem: &FractionalProblem, v_n: &CVec) -> Result<Surrogate> {
    check_unit_modulus(v_n)?;
    let eval = problem.evaluate(v_n)?;
    let n = problem.n() as f64;
    let bv = problem.b_apply(v_n);
    let (mut consts, mut grads, mut omega, mut psi) = (vec![], vec![], vec![], vec![]);
    for k in 0..problem.k() {
        let vcv = eval.vcv[k];
        let vbv = eval.vbv;
        let lambda = problem.lambda_max(k);
        let w = 1.0 / vcv;
        let p = vbv / (vcv * (vcv + vbv));
        // (C_k + B − λI)v_n
        let shifted = problem.c_apply(k, v_n) + &bv - v_n * C64::new(lambda, 0.0);
        let quad = v_n.dotc(&shifted).re;
        grads.push(&bv * C64::new(w, 0.0) - &shifted * C64::new(p, 0.0));
        consts.push(eval.values[k] - vbv / vcv + p * quad - n * p * lambda);
        omega.push(w);
        psi.push(p);
    }
    Ok(Surrogate {
        consts,
        grads,
        omega,
        psi,
        values: eval.values,
    })
}

/// Max-Sum update `v_{n+1} = exp{j∠(Σ_k f_k)}`.
pub fn maxsum_step(problem: &FractionalProblem, v_n: &PhaseShifts) -> Result<PhaseShifts> {
    let s = surrogate(problem, v_n.v())?;
    let c = s
        .grads
        .iter()
        .fold(CVec::zeros(problem.n()), |acc, g| acc + g);
    Ok(PhaseShifts::project(&c, v_n))
}

/// Softmin weights `l_k ∝ exp(−μ·x_k)`, computed with a max-shift.
pub fn softmin_weights(values: &[f64], mu: f64) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let e: Vec<f64> = values.iter().map(|x| (-mu * (x - lo)).exp()).collect();
    let total: f64 = e.iter().sum();
    e.iter().map(|x| x / total).collect()
}

/// `−(1/μ)·ln Σ_k exp(−μ·x_k)`, never above `min_k x_k`.
pub fn smoothed_min(values: &[f64], mu: f64) -> f64 {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let s: f64 = values.iter().map(|x| (-mu * (x - lo)).exp()).sum();
    lo - s.ln() / mu
}

/// Max-Min update `v_{n+1} = exp{j∠(Σ_k l_k f_k + 2μ·max_k‖f_k‖²·v_n)}`.
pub fn maxmin_step(problem: &FractionalProblem, v_n: &PhaseShifts, mu: f64) -> Result<PhaseShifts> {
    if mu.is_nan() || mu <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "mu must be positive, got {mu}"
        )));
    }
    let s = surrogate(problem, v_n.v())?;
    let l = softmin_weights(&s.values, mu);
    let peak = s.grads.iter().map(|g| g.norm_squared()).fold(0.0, f64::max);
    let mut c = v_n.v() * C64::new(2.0 * mu * peak, 0.0);
    for (g, w) in s.grads.iter().zip(&l) {
        c += g * C64::new(*w, 0.0);
    }
    Ok(PhaseShifts::project(&c, v_n))
}

/// Stopping rule and acceleration limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MmOptions {
    pub max_iter: usize,
    pub rel_tol: f64,
    pub max_backtracks: usize,
}

impl Default for MmOptions {
    fn default() -> Self {
        MmOptions {
            max_iter: 500,
            rel_tol: 1e-6,
            max_backtracks: 30,
        }
    }
}

/// One accepted iterate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    /// Tracked objective: `Σ_k f_k` or the smoothed minimum (nats).
    pub objective: f64,
    /// Unsmoothed `min_k f_k` (nats).
    pub min_value: f64,
    /// `ρ` halvings spent before acceptance.
    pub backtracks: usize,
}

#[derive(Debug, Clone)]
pub struct OptTrace {
    pub iterates: Vec<TraceEntry>,
    pub converged: bool,
    pub final_v: PhaseShifts,
    /// Iterate with the largest unsmoothed objective seen.
    pub best_v: PhaseShifts,
}

impl OptTrace {
    pub fn iterations(&self) -> usize {
        self.iterates.len() - 1
    }
}

fn tracked(
    problem: &FractionalProblem,
    objective: Objective,
    v: &PhaseShifts,
) -> Result<(f64, f64, f64)> {
    let f = problem.values(v.v())?;
    let min = f.iter().copied().fold(f64::INFINITY, f64::min);
    let sum: f64 = f.iter().sum();
    Ok(match objective {
        Objective::Sum => (sum, min, sum),
        Objective::Min => (smoothed_min(&f, problem.mu()), min, min),
    })
}

fn extrapolate(v: &CVec, d1: &CVec, d2: &CVec, rho: f64, fallback: &PhaseShifts) -> PhaseShifts {
    let x = v - d1 * C64::new(2.0 * rho, 0.0) + d2 * C64::new(rho * rho, 0.0);
    // −exp{j∠x}: the sign is a global phase and leaves every f_k unchanged.
    let p = PhaseShifts::project(&x, fallback);
    p.rotated(std::f64::consts::PI)
}

/// Accelerated MM on an already built problem.
///
/// Each outer iteration takes two plain MM steps `v⁽¹⁾, v⁽²⁾`, forms
/// `Δ₁ = v⁽¹⁾ − v_n`, `Δ₂ = v⁽²⁾ − v⁽¹⁾ − Δ₁`, `ρ = −‖Δ₁‖/‖Δ₂‖`, and tries
/// `−exp{j∠(v_n − 2ρΔ₁ + ρ²Δ₂)}`. While that candidate lowers the objective,
/// `ρ ← (ρ − 1)/2`; after `max_backtracks` halvings `v⁽²⁾` is taken. If
/// `Δ₂ = 0` the extrapolation is skipped. Stops when the relative change of
/// the objective drops below `rel_tol`.
pub fn run_mm(
    problem: &FractionalProblem,
    objective: Objective,
    init: &PhaseShifts,
    options: &MmOptions,
) -> Result<OptTrace> {
    if init.len() != problem.n() {
        return Err(Error::DimensionMismatch(format!(
            "init has {} entries, N={}",
            init.len(),
            problem.n()
        )));
    }
    check_unit_modulus(init.v())?;
    let mu = problem.mu();
    let step = |v: &PhaseShifts| match objective {
        Objective::Sum => maxsum_step(problem, v),
        Objective::Min => maxmin_step(problem, v, mu),
    };
    let mut v = init.clone();
    let (mut obj, min0, true0) = tracked(problem, objective, &v)?;
    let mut iterates = vec![TraceEntry {
        iteration: 0,
        objective: obj,
        min_value: min0,
        backtracks: 0,
    }];
    let mut best = (true0, v.clone());
    let mut converged = false;
    for it in 1..=options.max_iter {
        let v1 = step(&v)?;
        let v2 = step(&v1)?;
        let d1 = v1.v() - v.v();
        let d2 = v2.v() - v1.v() - &d1;
        let mut backtracks = 0;
        let d2n = d2.norm();
        let (cand, cand_eval) = if d2n == 0.0 {
            let e = tracked(problem, objective, &v2)?;
            (v2, e)
        } else {
            let mut rho = -d1.norm() / d2n;
            let mut cand = extrapolate(v.v(), &d1, &d2, rho, &v2);
            let mut e = tracked(problem, objective, &cand);
            while !matches!(e, Ok((o, _, _)) if o >= obj) && backtracks < options.max_backtracks {
                rho = (rho - 1.0) / 2.0;
                cand = extrapolate(v.v(), &d1, &d2, rho, &v2);
                e = tracked(problem, objective, &cand);
                backtracks += 1;
            }
            match e {
                Ok(e) if e.0 >= obj => (cand, e),
                _ => {
                    let e = tracked(problem, objective, &v2)?;
                    (v2, e)
                }
            }
        };
        let (new_obj, min_value, true_obj) = cand_eval;
        if new_obj < obj {
            // Only reachable through rounding in the plain MM step; keep the current point.
            converged = true;
            break;
        }
        let change = (new_obj - obj).abs() / obj.abs().max(f64::MIN_POSITIVE);
        v = cand;
        obj = new_obj;
        iterates.push(TraceEntry {
            iteration: it,
            objective: obj,
            min_value,
            backtracks,
        });
        if true_obj > best.0 {
            best = (true_obj, v.clone());
        }
        if change < options.rel_tol {
            converged = true;
            break;
        }
    }
    Ok(OptTrace {
        iterates,
        converged,
        final_v: v,
        best_v: best.1,
    })
}

/// Builds the problem for `config` and runs [`run_mm`].
pub fn mm_optimize(
    config: &SystemConfig,
    objective: Objective,
    init: &PhaseShifts,
    options: &MmOptions,
) -> Result<OptTrace> {
    run_mm(&build_problem(config)?, objective, init, options)
}
