//! System configuration, URA geometry and random channel synthesis.
//!
//! Channel model, per coherence interval:
//!
//! - user–RIS `H₁ = [√α₁ h̄₁, …, √α_K h̄_K]` is pure LoS,
//! - RIS–BS `H₂ = √(β/(δ+1)) (√δ H̄₂ + H̃₂)` is Rician with `H̄₂ = a_M a_Nᴴ`,
//! - user–BS `D = [√γ₁ d̃₁, …]` is Rayleigh,
//! - aggregated `Q = H₂ Φ H₁ + D`.

mod config;
mod geometry;
mod realization;
mod steering;

pub use config::{db_to_linear, dbm_to_watts, watts_to_dbm, Angles, PhaseShifts, SystemConfig};
pub use geometry::{DeploymentGeometry, PathLossModel, DEFAULT_PROFILE_SEED};
pub use realization::{sample_channels, substream_rng, ChannelRealization, ChannelSampler};
pub use steering::{build_los, decompose_grid, steering_inner, steering_vector, LosChannels};
