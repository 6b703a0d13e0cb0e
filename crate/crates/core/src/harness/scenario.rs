use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{substream_rng, PhaseShifts, SystemConfig};
use crate::optimizer::{align_phase, build_problem, quantize_phase, run_mm, MmOptions, Objective};
use crate::rate::{rate_report, RateModel};
use crate::{Error, Result};

/// Default number of Monte-Carlo trials per point.
pub const DEFAULT_TRIALS: usize = 2000;

/// Stream index reserved for random phase designs, far above trial streams.
const PHASE_STREAM: u64 = 1 << 62;

/// How the RIS phase shifts of a scenario are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseDesign {
    /// Aligned to the nearest user.
    Case1AlignNearest,
    /// Aligned to the farthest user.
    Case2AlignFarthest,
    /// Uniform on `[0, 2π)` from the scenario seed.
    Case3Random,
    /// All phases zero.
    Case4Identity,
    /// Max-Sum MM.
    Case5Maxsum,
    /// Max-Min MM.
    Case6Maxmin,
    /// Given phase angles θ_n in radians.
    Explicit(Vec<f64>),
}

impl PhaseDesign {
    pub fn name(&self) -> &'static str {
        match self {
            PhaseDesign::Case1AlignNearest => "case1",
            PhaseDesign::Case2AlignFarthest => "case2",
            PhaseDesign::Case3Random => "case3",
            PhaseDesign::Case4Identity => "case4",
            PhaseDesign::Case5Maxsum => "case5",
            PhaseDesign::Case6Maxmin => "case6",
            PhaseDesign::Explicit(_) => "explicit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    N,
    M,
    /// Transmit power in watts.
    P,
    Delta,
    /// Phase quantization bits applied to the resolved design.
    Bits,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::N => "N",
            SweepAxis::M => "M",
            SweepAxis::P => "p",
            SweepAxis::Delta => "delta",
            SweepAxis::Bits => "bits",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub config: SystemConfig,
    pub design: PhaseDesign,
    pub sweep: Option<Sweep>,
    pub trials: usize,
    pub seed: u64,
    /// Overrides the largest-α rule for Case 1.
    pub nearest_user: Option<usize>,
    /// Overrides the smallest-α rule for Case 2.
    pub farthest_user: Option<usize>,
    pub mm: MmOptions,
}

impl Scenario {
    pub fn new(config: SystemConfig, design: PhaseDesign) -> Self {
        Scenario {
            config,
            design,
            sweep: None,
            trials: DEFAULT_TRIALS,
            seed: 0,
            nearest_user: None,
            farthest_user: None,
            mm: MmOptions::default(),
        }
    }

    pub fn with_sweep(mut self, axis: SweepAxis, values: Vec<f64>) -> Self {
        self.sweep = Some(Sweep { axis, values });
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Checks the scenario-level invariants. The configuration itself is
    /// validated per sweep point, so that an infeasible point only marks its
    /// own row.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::InvalidConfig("sweep has no values".into()));
            }
            if sweep.values.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidConfig("sweep values must be finite".into()));
            }
            if sweep.values.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidConfig(
                    "sweep values must be strictly increasing".into(),
                ));
            }
            let integral = matches!(sweep.axis, SweepAxis::N | SweepAxis::M | SweepAxis::Bits);
            if integral && sweep.values.iter().any(|x| *x < 0.0 || x.fract() != 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "sweep over {} needs non-negative integers",
                    sweep.axis.name()
                )));
            }
        }
        for user in [self.nearest_user, self.farthest_user]
            .into_iter()
            .flatten()
        {
            if user >= self.config.k {
                return Err(Error::InvalidConfig(format!(
                    "user index {user} out of range for K={}",
                    self.config.k
                )));
            }
        }
        Ok(())
    }

    /// Sweep points as `(value, config, quantization bits)`.
    fn points(&self) -> Vec<(Option<f64>, SystemConfig, Option<u32>)> {
        let Some(sweep) = &self.sweep else {
            return vec![(None, self.config.clone(), None)];
        };
        sweep
            .values
            .iter()
            .map(|&x| {
                let mut cfg = self.config.clone();
                let mut bits = None;
                match sweep.axis {
                    SweepAxis::N => cfg.n = x as usize,
                    SweepAxis::M => cfg.m = x as usize,
                    SweepAxis::P => cfg.p = x,
                    SweepAxis::Delta => cfg.delta = x,
                    SweepAxis::Bits => bits = Some(x as u32),
                }
                (Some(x), cfg, bits)
            })
            .collect()
    }
}

/// Index of the user with the largest `α` (first on ties).
pub fn nearest_user(config: &SystemConfig) -> usize {
    (0..config.k).fold(0, |best, k| {
        if config.alpha[k] > config.alpha[best] {
            k
        } else {
            best
        }
    })
}

/// Index of the user with the smallest `α` (last on ties).
pub fn farthest_user(config: &SystemConfig) -> usize {
    (0..config.k).fold(0, |best, k| {
        if config.alpha[k] <= config.alpha[best] {
            k
        } else {
            best
        }
    })
}

/// Phase shifts of a design together with the optimizer iteration count.
#[derive(Debug, Clone)]
pub struct ResolvedPhase {
    pub phase: PhaseShifts,
    pub iterations: usize,
}

fn min_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::INFINITY, f64::min)
}

fn heuristic(
    scenario: &Scenario,
    config: &SystemConfig,
    design: &PhaseDesign,
) -> Result<PhaseShifts> {
    match design {
        PhaseDesign::Case1AlignNearest => align_phase(
            config,
            scenario.nearest_user.unwrap_or(nearest_user(config)),
        ),
        PhaseDesign::Case2AlignFarthest => align_phase(
            config,
            scenario.farthest_user.unwrap_or(farthest_user(config)),
        ),
        PhaseDesign::Case3Random => Ok(PhaseShifts::random(
            config.n,
            &mut substream_rng(scenario.seed, PHASE_STREAM),
        )),
        PhaseDesign::Case4Identity => Ok(PhaseShifts::identity(config.n)),
        PhaseDesign::Explicit(thetas) => {
            if thetas.len() != config.n {
                return Err(Error::DimensionMismatch(format!(
                    "{} phases given, N={}",
                    thetas.len(),
                    config.n
                )));
            }
            Ok(PhaseShifts::from_thetas(thetas))
        }
        PhaseDesign::Case5Maxsum | PhaseDesign::Case6Maxmin => {
            unreachable!("optimized designs are not heuristics")
        }
    }
}

/// Picks the candidate maximizing `score` over the per-user lower-bound rates.
fn best_start(
    model: &RateModel,
    candidates: Vec<PhaseShifts>,
    score: fn(&[f64]) -> f64,
) -> Result<PhaseShifts> {
    let mut best: Option<(f64, PhaseShifts)> = None;
    for phase in candidates {
        let s = score(&model.lower_bound(&phase)?);
        if best.as_ref().is_none_or(|(b, _)| s > *b) {
            best = Some((s, phase));
        }
    }
    Ok(best.expect("at least one candidate").1)
}

/// Resolves `design` at `config`.
///
/// Max-Sum starts from the best of Cases 1–4 by sum rate; Max-Min starts
/// from the best of Cases 1–5 by minimum rate. The returned phase is the
/// best iterate of the run.
pub fn resolve_design(
    scenario: &Scenario,
    config: &SystemConfig,
    design: &PhaseDesign,
) -> Result<ResolvedPhase> {
    let objective = match design {
        PhaseDesign::Case5Maxsum => Objective::Sum,
        PhaseDesign::Case6Maxmin => Objective::Min,
        _ => {
            return Ok(ResolvedPhase {
                phase: heuristic(scenario, config, design)?,
                iterations: 0,
            })
        }
    };
    let model = RateModel::new(config)?;
    let mut candidates = [
        PhaseDesign::Case1AlignNearest,
        PhaseDesign::Case2AlignFarthest,
        PhaseDesign::Case3Random,
        PhaseDesign::Case4Identity,
    ]
    .iter()
    .map(|d| heuristic(scenario, config, d))
    .collect::<Result<Vec<_>>>()?;
    let init = match objective {
        Objective::Sum => best_start(&model, candidates, |r| r.iter().sum())?,
        Objective::Min => {
            candidates.push(resolve_design(scenario, config, &PhaseDesign::Case5Maxsum)?.phase);
            best_start(&model, candidates, min_of)?
        }
    };
    let trace = run_mm(&build_problem(config)?, objective, &init, &scenario.mm)?;
    let iterations = trace.iterations();
    Ok(ResolvedPhase {
        phase: trace.best_v,
        iterations,
    })
}

/// One sweep point.
///
/// `status` is `"ok"` or an error code; on error every numeric field is NaN
/// and the per-user vectors are empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub sweep_axis: Option<SweepAxis>,
    pub sweep_value: Option<f64>,
    pub design: String,
    pub status: String,
    pub trials: usize,
    pub seed: u64,
    pub iterations: usize,
    pub rejected_trials: usize,
    pub mc_rate: Vec<f64>,
    pub mc_rate_std_err: Vec<f64>,
    pub lb: Vec<f64>,
    pub lb2: Vec<f64>,
    pub lb2_approx: Vec<f64>,
    pub ub: Vec<f64>,
    pub ub_aligned: Vec<f64>,
    pub sum_mc_rate: f64,
    pub sum_mc_rate_std_err: f64,
    pub min_mc_rate: f64,
    pub min_mc_rate_std_err: f64,
    pub sum_lb: f64,
    pub min_lb: f64,
    pub wall_time_ms: f64,
}

impl ResultRow {
    fn failed(scenario: &Scenario, value: Option<f64>, err: &Error) -> Self {
        ResultRow {
            sweep_axis: scenario.sweep.as_ref().map(|s| s.axis),
            sweep_value: value,
            design: scenario.design.name().to_string(),
            status: err.code().to_string(),
            trials: scenario.trials,
            seed: scenario.seed,
            iterations: 0,
            rejected_trials: 0,
            mc_rate: vec![],
            mc_rate_std_err: vec![],
            lb: vec![],
            lb2: vec![],
            lb2_approx: vec![],
            ub: vec![],
            ub_aligned: vec![],
            sum_mc_rate: f64::NAN,
            sum_mc_rate_std_err: f64::NAN,
            min_mc_rate: f64::NAN,
            min_mc_rate_std_err: f64::NAN,
            sum_lb: f64::NAN,
            min_lb: f64::NAN,
            wall_time_ms: 0.0,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

fn run_point(
    scenario: &Scenario,
    value: Option<f64>,
    config: &SystemConfig,
    bits: Option<u32>,
) -> Result<ResultRow> {
    config.validate()?;
    let resolved = resolve_design(scenario, config, &scenario.design)?;
    let phase = match bits {
        Some(b) => quantize_phase(&resolved.phase, b)?,
        None => resolved.phase,
    };
    let r = rate_report(config, &phase, scenario.trials, scenario.seed)?;
    Ok(ResultRow {
        sweep_axis: scenario.sweep.as_ref().map(|s| s.axis),
        sweep_value: value,
        design: scenario.design.name().to_string(),
        status: "ok".into(),
        trials: scenario.trials,
        seed: scenario.seed,
        iterations: resolved.iterations,
        rejected_trials: r.rejected_trials,
        sum_lb: r.per_user_lb.iter().sum(),
        min_lb: min_of(&r.per_user_lb),
        mc_rate: r.per_user_mc_rate,
        mc_rate_std_err: r.per_user_mc_std_err,
        lb: r.per_user_lb,
        lb2: r.per_user_lb2,
        lb2_approx: r.per_user_lb2_approx,
        ub: r.per_user_ub,
        ub_aligned: r.per_user_ub_aligned,
        sum_mc_rate: r.mc_sum_rate,
        sum_mc_rate_std_err: r.mc_sum_rate_std_err,
        min_mc_rate: r.mc_min_rate,
        min_mc_rate_std_err: r.mc_min_rate_std_err,
        wall_time_ms: 0.0,
    })
}

/// Evaluates the base point of `scenario`, ignoring any sweep, and returns
/// the first error instead of a marked row.
pub fn run_single(scenario: &Scenario) -> Result<ResultRow> {
    let mut s = scenario.clone();
    s.sweep = None;
    s.validate()?;
    let start = Instant::now();
    let mut row = run_point(&s, None, &s.config, None)?;
    row.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(row)
}

/// Evaluates every sweep point in parallel; rows come back in sweep order.
///
/// Every point reuses the scenario seed, so neighbouring points see common
/// random numbers. A point whose configuration is infeasible or whose
/// numerics fail yields a row carrying the error code.
pub fn run_scenario(scenario: &Scenario) -> Result<Vec<ResultRow>> {
    scenario.validate()?;
    Ok(scenario
        .points()
        .into_par_iter()
        .map(|(value, cfg, bits)| {
            let start = Instant::now();
            let mut row = run_point(scenario, value, &cfg, bits)
                .unwrap_or_else(|e| ResultRow::failed(scenario, value, &e));
            row.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
            row
        })
        .collect())
}
