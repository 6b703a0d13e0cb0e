//! Acceptance criteria. Runs as a plain binary: one PASS/FAIL line per
//! criterion, non-zero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{min_of, random_config, rel_err};
use rislab::channel::{
    build_los, steering_vector, substream_rng, ChannelSampler, PhaseShifts, SystemConfig,
};
use rislab::estimation::{mmse_coefficients, Estimator};
use rislab::harness::{
    antennas_for_snr, farthest_user, resolve_design, run_scenario, PhaseDesign, Scenario,
    SweepAxis, TRADEOFF_SNR,
};
use rislab::optimizer::{
    align_phase, build_problem, quantize_phase, run_mm, surrogate, MmOptions, Objective,
};
use rislab::rate::{exact_rate_mc, power_scaling_limit, required_antennas, RateModel};
use rislab::stats::MeanStat;
use rislab::{CMat, Result, C64};

const SANDWICH_TOL: f64 = 1e-10;
const RAYLEIGH_EQ_TOL: f64 = 1e-12;
const MC_REL_TOL: f64 = 0.05;
const MC_TRIALS: usize = 2000;
const LB2_INCREMENT: (f64, f64) = (0.8, 1.1);
const ALIGNED_INCREMENT: (f64, f64) = (1.7, 2.1);
const MOMENT_TRIALS: usize = 10_000;
const MOMENT_SIGMAS: f64 = 3.0;
const SURROGATE_TOL: f64 = 1e-10;
const MONOTONE_TOL: f64 = 1e-12;
const DESIGN_TOL: f64 = 1e-12;
const IDENTITY_TOL: f64 = 1e-10;
const LIMIT_GAP: f64 = 0.02;
const DOUBLING_INCREMENT: (f64, f64) = (0.85, 1.15);
const TRADEOFF_TOL: f64 = 0.05;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn within(x: f64, (lo, hi): (f64, f64)) -> bool {
    (lo..=hi).contains(&x)
}

fn sandwich() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..200 {
        let cfg = random_config(&mut rng, 2..=6, 8..=64);
        let phase = PhaseShifts::random(cfg.n, &mut rng);
        let model = RateModel::new(&cfg)?;
        let lb = model.lower_bound(&phase)?;
        let lb2 = model.lb2();
        let (ub, ub_aligned) = model.upper_bound(&phase)?;
        for k in 0..cfg.k {
            for (lo, hi) in [(lb2[k], lb[k]), (lb[k], ub[k]), (ub[k], ub_aligned[k])] {
                worst = worst.max((lo - hi) / hi.abs());
            }
        }
    }
    outcome(
        worst <= SANDWICH_TOL,
        format!("largest relative violation {worst:.2e} (tol {SANDWICH_TOL:.0e})"),
    )
}

fn rayleigh_equality() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let mut cfg = random_config(&mut rng, 2..=6, 8..=64);
        cfg.delta = 0.0;
        let phase = PhaseShifts::random(cfg.n, &mut rng);
        let model = RateModel::new(&cfg)?;
        let lb = model.lower_bound(&phase)?;
        for (a, b) in lb.iter().zip(model.lb2()) {
            worst = worst.max(rel_err(b, *a));
        }
    }
    outcome(
        worst <= RAYLEIGH_EQ_TOL,
        format!("largest relative gap {worst:.2e} (tol {RAYLEIGH_EQ_TOL:.0e})"),
    )
}

fn monte_carlo_vs_closed_form() -> Result<Outcome> {
    let cfg = SystemConfig::reference();
    let phase = PhaseShifts::identity(cfg.n);
    let lb = RateModel::new(&cfg)?.lower_bound(&phase)?;
    let mc = exact_rate_mc(&cfg, &phase, MC_TRIALS, 0)?;
    let worst = mc
        .means()
        .iter()
        .zip(&lb)
        .map(|(m, l)| rel_err(*m, *l))
        .fold(0.0, f64::max);
    outcome(
        worst <= MC_REL_TOL,
        format!(
            "largest |MC − LB|/LB {worst:.4} over {} users, {MC_TRIALS} trials (tol {MC_REL_TOL})",
            cfg.k
        ),
    )
}

fn scaling_increments() -> Result<Outcome> {
    let base = SystemConfig::reference();
    let tau_o = base.tau_overhead();
    let lb2_sum = |n: usize| -> Result<f64> {
        let mut c = base.clone();
        c.n = n;
        Ok(RateModel::new(&c)?.lb2().iter().sum())
    };
    let per_user = (lb2_sum(400)? - lb2_sum(200)?) / (tau_o * base.k as f64);

    let s = Scenario::new(base.clone(), PhaseDesign::Case1AlignNearest)
        .with_trials(MC_TRIALS)
        .with_sweep(SweepAxis::N, vec![200.0, 400.0]);
    let rows = run_scenario(&s)?;
    let k = rislab::harness::nearest_user(&base);
    let aligned = rows[1].mc_rate[k] - rows[0].mc_rate[k];
    let se = rows[0].mc_rate_std_err[k].hypot(rows[1].mc_rate_std_err[k]);
    outcome(
        within(per_user, LB2_INCREMENT) && within(aligned, ALIGNED_INCREMENT),
        format!(
            "zero-phase LB2 increment {per_user:.4}·τ° per user (range {LB2_INCREMENT:?}); \
             aligned-user MC increment {aligned:.4} ± {se:.4} bits (range {ALIGNED_INCREMENT:?})"
        ),
    )
}

fn estimator_moments() -> Result<Outcome> {
    let mut cfg = SystemConfig::reference();
    rislab::channel::DeploymentGeometry::ring(3, rislab::channel::DEFAULT_PROFILE_SEED)
        .apply(&rislab::channel::PathLossModel::default(), &mut cfg);
    cfg.tau = 3;
    cfg.m = 16;
    cfg.n = 16;
    let (m, k) = (cfg.m, cfg.k);
    let phase = PhaseShifts::identity(cfg.n);
    let sampler = ChannelSampler::new(&cfg, &phase)?;
    let est = Estimator::new(&sampler)?;

    // Independent second-moment oracle.
    let nlos = cfg.beta / (cfg.delta + 1.0);
    let los_gain = cfg.beta * cfg.delta / (cfg.delta + 1.0);
    let s = cfg.sigma2 / (cfg.tau as f64 * cfg.p);
    let x: Vec<f64> = (0..k)
        .map(|i| cfg.n as f64 * cfg.alpha[i] * nlos + cfg.gamma[i])
        .collect();
    let kappa: Vec<f64> = x.iter().map(|x| x / (x + s)).collect();
    let eps: Vec<f64> = x.iter().map(|x| 1.0 / (1.0 / x + 1.0 / s)).collect();
    let h: Vec<_> = (0..k)
        .map(|i| {
            steering_vector(cfg.n, cfg.user_ris_angles[i], cfg.d_over_lambda)
                * C64::new(cfg.alpha[i].sqrt(), 0.0)
        })
        .collect();
    let a_n = steering_vector(cfg.n, cfg.ris_aod, cfg.d_over_lambda);
    let a_m = steering_vector(cfg.m, cfg.bs_aoa, cfg.d_over_lambda);
    let t: Vec<C64> = h
        .iter()
        .map(|hk| a_n.dotc(&phase.phi_diag().component_mul(hk)))
        .collect();
    let expected = CMat::from_fn(k, k, |i, j| {
        let lambda = if i == j {
            (x[i] + s) * kappa[i] * kappa[i]
        } else {
            0.0
        };
        let off = if i == j {
            C64::new(0.0, 0.0)
        } else {
            h[i].dotc(&h[j]) * nlos * kappa[i] * kappa[j]
        };
        (C64::new(lambda, 0.0) + off) * m as f64
            + t[i].conj() * t[j] * los_gain * a_m.norm_squared()
    });

    let mut err_power = vec![Vec::with_capacity(MOMENT_TRIALS); k];
    let mut gram = vec![Vec::with_capacity(MOMENT_TRIALS); k * k];
    for trial in 0..MOMENT_TRIALS {
        let r = sampler.sample(&mut substream_rng(0, trial as u64));
        let (qhat, e) = est.estimate(&r)?;
        for i in 0..k {
            err_power[i].push(e.column(i).norm_squared() / m as f64);
        }
        let g = qhat.adjoint() * &qhat;
        for (idx, z) in g.iter().enumerate() {
            gram[idx].push(*z);
        }
    }
    let mut worst: f64 = 0.0;
    for i in 0..k {
        let st = MeanStat::from_samples(&err_power[i]);
        worst = worst.max((st.mean - eps[i]).abs() / st.std_err);
    }
    let eps_sigmas = worst;
    for (idx, zs) in gram.iter().enumerate() {
        let (i, j) = (idx % k, idx / k);
        let re = MeanStat::from_samples(&zs.iter().map(|z| z.re).collect::<Vec<_>>());
        worst = worst.max((re.mean - expected[(i, j)].re).abs() / re.std_err);
        if i != j {
            let im = MeanStat::from_samples(&zs.iter().map(|z| z.im).collect::<Vec<_>>());
            worst = worst.max((im.mean - expected[(i, j)].im).abs() / im.std_err);
        }
    }
    let lib_eps = mmse_coefficients(&cfg)?.epsilon;
    let eps_match = lib_eps
        .iter()
        .zip(&eps)
        .all(|(a, b)| rel_err(*a, *b) < 1e-12);
    outcome(
        worst <= MOMENT_SIGMAS && eps_match,
        format!(
            "error power within {eps_sigmas:.2} SE, worst moment deviation {worst:.2} SE over {MOMENT_TRIALS} trials \
             (limit {MOMENT_SIGMAS})"
        ),
    )
}

fn mm_correctness() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let (mut tangency, mut minor, mut drop) = (0.0f64, f64::NEG_INFINITY, f64::NEG_INFINITY);
    let (mut sum_short, mut min_short) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let (mut sum_gain, mut min_gain) = (0.0, 0.0);
    let options = MmOptions {
        max_iter: 60,
        ..MmOptions::default()
    };
    for p in 0..50 {
        let cfg = random_config(&mut rng, 2..=4, 8..=32);
        let problem = build_problem(&cfg)?;
        let v_n = PhaseShifts::random(cfg.n, &mut rng);
        let s = surrogate(&problem, v_n.v())?;
        for k in 0..cfg.k {
            tangency =
                tangency.max((s.eval(k, v_n.v()) - s.values[k]).abs() / s.values[k].abs().max(1.0));
        }
        for _ in 0..20 {
            let v = PhaseShifts::random(cfg.n, &mut rng);
            let f = problem.values(v.v())?;
            for k in 0..cfg.k {
                minor = minor.max((s.eval(k, v.v()) - f[k]) / f[k].abs().max(1.0));
            }
        }
        for objective in [Objective::Sum, Objective::Min] {
            let trace = run_mm(&problem, objective, &v_n, &options)?;
            for w in trace.iterates.windows(2) {
                drop = drop.max((w[0].objective - w[1].objective) / w[0].objective.abs().max(1.0));
            }
        }

        let scenario = Scenario::new(cfg.clone(), PhaseDesign::Case4Identity).with_seed(p);
        let model = RateModel::new(&cfg)?;
        let mut rates = Vec::new();
        for d in [
            PhaseDesign::Case1AlignNearest,
            PhaseDesign::Case2AlignFarthest,
            PhaseDesign::Case3Random,
            PhaseDesign::Case4Identity,
            PhaseDesign::Case5Maxsum,
        ] {
            rates.push(model.lower_bound(&resolve_design(&scenario, &cfg, &d)?.phase)?);
        }
        let r6 = model
            .lower_bound(&resolve_design(&scenario, &cfg, &PhaseDesign::Case6Maxmin)?.phase)?;
        let best_sum = rates[..4]
            .iter()
            .map(|r| r.iter().sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        let sum5: f64 = rates[4].iter().sum();
        let best_min = rates
            .iter()
            .map(|r| min_of(r))
            .fold(f64::NEG_INFINITY, f64::max);
        sum_short = sum_short.max((best_sum - sum5) / best_sum);
        min_short = min_short.max((best_min - min_of(&r6)) / best_min);
        sum_gain += (sum5 - best_sum) / 50.0;
        min_gain += (min_of(&r6) - best_min) / 50.0;
    }
    outcome(
        tangency <= SURROGATE_TOL
            && minor <= SURROGATE_TOL
            && drop <= MONOTONE_TOL
            && sum_short <= DESIGN_TOL
            && min_short <= DESIGN_TOL,
        format!(
            "tangency {tangency:.1e}, minorization slack {minor:.1e}, largest objective drop {drop:.1e}; \
             Max-Sum shortfall {sum_short:.1e} (mean gain {sum_gain:.4} bits), \
             Max-Min shortfall {min_short:.1e} (mean gain {min_gain:.4} bits)"
        ),
    )
}

fn gram_identity() -> Result<Outcome> {
    let cfg = SystemConfig::reference();
    let problem = build_problem(&cfg)?;
    let model = RateModel::new(&cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let v = PhaseShifts::random(cfg.n, &mut rng);
        let snr = model.lower_bound_snr(&v)?;
        let e = problem.evaluate(v.v())?;
        for k in 0..cfg.k {
            let f = (e.vbv / e.vcv[k]).ln_1p();
            worst = worst.max(rel_err(f, snr[k].ln_1p()));
        }
    }
    outcome(
        worst <= IDENTITY_TOL,
        format!("largest relative difference {worst:.2e} (tol {IDENTITY_TOL:.0e})"),
    )
}

fn power_scaling() -> Result<Outcome> {
    const E_U: f64 = 10.0;
    const N: usize = 100_000;
    let limit_at = |m: usize| -> Result<(Vec<f64>, Vec<f64>)> {
        let mut cfg = SystemConfig::reference();
        cfg.m = m;
        cfg.n = N;
        cfg.p = E_U / N as f64;
        let phase = PhaseShifts::identity(N);
        let rate = RateModel::new(&cfg)?.lower_bound(&phase)?;
        let (limit, _) = power_scaling_limit(&cfg, &phase, E_U)?.rates(cfg.tau_overhead());
        Ok((rate, limit))
    };
    let (r32, l32) = limit_at(32)?;
    let (r64, l64) = limit_at(64)?;
    let gap = r32
        .iter()
        .zip(&l32)
        .chain(r64.iter().zip(&l64))
        .map(|(r, l)| rel_err(*r, *l))
        .fold(0.0, f64::max);
    let inc: Vec<f64> = l64.iter().zip(&l32).map(|(a, b)| a - b).collect();
    let (lo, hi) = (
        min_of(&inc),
        inc.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );
    outcome(
        gap <= LIMIT_GAP && within(lo, DOUBLING_INCREMENT) && within(hi, DOUBLING_INCREMENT),
        format!(
            "largest gap to limit at N=1e5 {gap:.2e} (tol {LIMIT_GAP}); limit increment 32→64 antennas \
             in [{lo:.3}, {hi:.3}] bits (range {DOUBLING_INCREMENT:?})"
        ),
    )
}

fn antenna_tradeoff() -> Result<Outcome> {
    let mut cfg = SystemConfig::reference();
    cfg.delta = 0.0;
    let k = farthest_user(&cfg);
    let mut errs = Vec::new();
    for n in [64, 128, 256] {
        cfg.n = n;
        let m = antennas_for_snr(&cfg, k, TRADEOFF_SNR)?;
        errs.push(rel_err(required_antennas(&cfg, n, TRADEOFF_SNR, k), m));
    }
    let worst = errs.iter().copied().fold(0.0, f64::max);
    outcome(
        worst <= TRADEOFF_TOL,
        format!("user {k}: relative error {errs:.4?} for N = 64, 128, 256 (tol {TRADEOFF_TOL})"),
    )
}

fn quantization() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let mut margin = f64::INFINITY;
    let mut checks = 0;
    for n in [16, 64, 256] {
        for _ in 0..5 {
            let mut cfg = random_config(&mut rng, 2..=6, 8..=8);
            cfg.n = n;
            let los = build_los(&cfg);
            for k in 0..cfg.k {
                let aligned = align_phase(&cfg, k)?;
                for bits in 1..=3u32 {
                    let q = quantize_phase(&aligned, bits)?;
                    let t = los.los_products(&q)[k].norm_sqr() / cfg.alpha[k];
                    let bound =
                        (n as f64 * (std::f64::consts::PI / 2f64.powi(bits as i32)).cos()).powi(2);
                    margin = margin.min(t - bound);
                    checks += 1;
                }
            }
        }
    }
    outcome(
        margin >= 0.0,
        format!("{checks} checks, smallest margin {margin:.3e}"),
    )
}

type Criterion = fn() -> Result<Outcome>;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion, Duration); 10] = [
        ("sandwich inequality", sandwich, Duration::from_secs(30)),
        (
            "Rayleigh equality",
            rayleigh_equality,
            Duration::from_secs(5),
        ),
        (
            "Monte-Carlo vs closed form",
            monte_carlo_vs_closed_form,
            Duration::from_secs(300),
        ),
        (
            "scaling increments",
            scaling_increments,
            Duration::from_secs(600),
        ),
        (
            "estimator moments",
            estimator_moments,
            Duration::from_secs(120),
        ),
        ("MM correctness", mm_correctness, Duration::from_secs(300)),
        (
            "cross-module identity",
            gram_identity,
            Duration::from_secs(10),
        ),
        ("power scaling", power_scaling, Duration::from_secs(60)),
        (
            "antenna trade-off",
            antenna_tradeoff,
            Duration::from_secs(60),
        ),
        ("quantization", quantization, Duration::from_secs(5)),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && elapsed <= *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} {:>2} {name}: {detail} [{:.2?} of {:?}]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed,
            budget
        );
    }
    println!(
        "{}/{} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
