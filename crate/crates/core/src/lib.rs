//! Simulation and optimization toolkit for the uplink of RIS-aided massive MIMO
//! with zero-forcing detection under imperfect CSI.
//!
//! The crate is split along the processing chain:
//!
//! - [`channel`]: URA steering geometry, system configuration and random
//!   channel synthesis (pure-LoS user–RIS, Rician RIS–BS, Rayleigh direct links).
//! - [`estimation`]: MMSE estimation of the aggregated channel and its
//!   deterministic statistics.
//! - [`rate`]: Monte-Carlo ergodic rate with ZF detection, the closed-form
//!   lower bound and the family of bounds/scaling laws derived from it.
//! - [`optimizer`]: Max-Sum and Max-Min phase-shift design via
//!   majorization-minimization, plus alignment and quantization heuristics.
//! - [`harness`]: scenario files, sweeps, figure reproduction and CSV/JSON output.

pub mod channel;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod linalg;
pub mod optimizer;
pub mod rate;
pub mod stats;
#[cfg(test)]
mod testkit;

pub use channel::{PhaseShifts, SystemConfig};
pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVec = nalgebra::DVector<C64>;
