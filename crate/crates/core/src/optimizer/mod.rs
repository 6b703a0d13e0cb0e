//! RIS phase-shift design.
//!
//! The per-user rate bound is rewritten as `ln(1 + vᴴBv / vᴴC_kv)` in the
//! unit-modulus vector `v`; Max-Sum and Max-Min designs are then solved by
//! majorization-minimization with closed-form updates and an extrapolation
//! step. Alignment and nearest-point quantization provide heuristic designs.

mod eigen;
mod mm;
mod phase;
mod problem;

pub use eigen::{lambda_max, Eigenpair, MAX_POWER_ITERATIONS};
pub use mm::{
    maxmin_step, maxsum_step, mm_optimize, run_mm, smoothed_min, softmin_weights, surrogate,
    MmOptions, Objective, OptTrace, Surrogate, TraceEntry,
};
pub use phase::{align_phase, quantize_phase};
pub use problem::{build_problem, Evaluation, FractionalProblem, LAMBDA_TOL};
