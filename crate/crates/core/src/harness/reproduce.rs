//! Data behind the standard figures, written as CSV files.
//!
//! | id    | content                                                        |
//! |-------|----------------------------------------------------------------|
//! | fig2a | per-user rates vs N, phases aligned to the nearest / farthest user |
//! | fig2b | per-user rates vs N for farthest-aligned, random and zero phases |
//! | fig3a | sum rate vs N for Cases 1, 2, 3 and 5                          |
//! | fig3b | minimum rate vs N for Cases 1, 2, 3, 5 and 6                   |
//! | fig4a | antennas needed for a fixed SNR vs N under Rayleigh RIS–BS fading |
//! | fig4b | rate vs N under `p = E_u/N` against its large-N limit          |
//!
//! fig2a–fig3b produce one [`ResultRow`] CSV per design. fig4a and fig4b are
//! closed-form tables with their own headers.

use std::fs::{self, File};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::output::{save_run, write_manifest, Format, Manifest};
use super::scenario::{
    farthest_user, run_scenario, PhaseDesign, Scenario, SweepAxis, DEFAULT_TRIALS,
};
use crate::channel::{PhaseShifts, SystemConfig};
use crate::rate::{power_scaling_limit, required_antennas, RateModel};
use crate::{Error, Result};

pub const FIGURES: [&str; 6] = ["fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b"];

/// RIS sizes for the per-user and sum/min-rate figures.
pub const RATE_SWEEP_N: [f64; 6] = [25.0, 50.0, 100.0, 200.0, 300.0, 400.0];
pub const DESIGN_SWEEP_N: [f64; 4] = [32.0, 64.0, 128.0, 256.0];
pub const TRADEOFF_N: [usize; 9] = [16, 24, 32, 48, 64, 96, 128, 192, 256];
/// Target SNR for the antenna trade-off table (20 dB).
pub const TRADEOFF_SNR: f64 = 100.0;
pub const POWER_SCALING_N: [usize; 7] = [100, 300, 1_000, 3_000, 10_000, 30_000, 100_000];
pub const POWER_SCALING_M: [usize; 2] = [32, 64];
/// Total RIS-side energy `E_u` in `p = E_u/N`.
pub const POWER_SCALING_EU: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct ReproduceOptions {
    pub out_dir: PathBuf,
    pub trials: usize,
    pub seed: u64,
    pub config: SystemConfig,
}

impl ReproduceOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        ReproduceOptions {
            out_dir: out_dir.into(),
            trials: DEFAULT_TRIALS,
            seed: 0,
            config: SystemConfig::reference(),
        }
    }
}

/// Continuous `M` at which user `k` reaches `target` SNR.
///
/// Bisects over integer `M` for the first value whose phase-free SNR meets
/// the target, then interpolates between the two bracketing integers. The
/// SNR is affine in `M`, so the interpolation is exact.
pub fn antennas_for_snr(config: &SystemConfig, k: usize, target: f64) -> Result<f64> {
    let snr = |m: usize| -> Result<f64> {
        if m == config.k {
            return Ok(0.0);
        }
        let mut c = config.clone();
        c.m = m;
        Ok(RateModel::new(&c)?.lb2_snr()[k])
    };
    let mut lo = config.k;
    let mut hi = config.k + 1;
    while snr(hi)? < target {
        lo = hi;
        hi *= 2;
        if hi > 1 << 40 {
            return Err(Error::Degenerate(format!(
                "target SNR {target} unreachable"
            )));
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if snr(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (a, b) = (snr(lo)?, snr(hi)?);
    Ok(lo as f64 + (target - a) / (b - a))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffRow {
    pub n: usize,
    pub user: usize,
    pub target_snr: f64,
    pub m_bisection: f64,
    pub m_closed_form: f64,
    pub relative_error: f64,
    /// `(M − K)(Nα_kβ + γ_k)` at the bisection `M`.
    pub product: f64,
}

/// Antenna/element trade-off for user `k` with a Rayleigh RIS–BS link.
pub fn tradeoff_table(
    config: &SystemConfig,
    k: usize,
    target: f64,
    ns: &[usize],
) -> Result<Vec<TradeoffRow>> {
    let mut cfg = config.clone();
    cfg.delta = 0.0;
    ns.iter()
        .map(|&n| {
            cfg.n = n;
            let m = antennas_for_snr(&cfg, k, target)?;
            let closed = required_antennas(&cfg, n, target, k);
            Ok(TradeoffRow {
                n,
                user: k,
                target_snr: target,
                m_bisection: m,
                m_closed_form: closed,
                relative_error: closed / m - 1.0,
                product: (m - cfg.k as f64) * (n as f64 * cfg.alpha[k] * cfg.beta + cfg.gamma[k]),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerScalingRow {
    pub m: usize,
    pub n: usize,
    pub p: f64,
    pub user: usize,
    pub rate: f64,
    pub limit_rate: f64,
    pub limit_lower_rate: f64,
}

/// Lower-bound rate with zero phases and `p = e_u/N`, next to its limit.
pub fn power_scaling_table(
    config: &SystemConfig,
    ms: &[usize],
    ns: &[usize],
    e_u: f64,
) -> Result<Vec<PowerScalingRow>> {
    let mut rows = Vec::new();
    for &m in ms {
        for &n in ns {
            let mut cfg = config.clone();
            cfg.m = m;
            cfg.n = n;
            cfg.p = e_u / n as f64;
            let phase = PhaseShifts::identity(n);
            let rate = RateModel::new(&cfg)?.lower_bound(&phase)?;
            let (limit, lower) = power_scaling_limit(&cfg, &phase, e_u)?.rates(cfg.tau_overhead());
            for k in 0..cfg.k {
                rows.push(PowerScalingRow {
                    m,
                    n,
                    p: cfg.p,
                    user: k,
                    rate: rate[k],
                    limit_rate: limit[k],
                    limit_lower_rate: lower[k],
                });
            }
        }
    }
    Ok(rows)
}

fn write_table<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn designs(figure: &str) -> (&'static [f64], Vec<PhaseDesign>) {
    use PhaseDesign::*;
    match figure {
        "fig2a" => (&RATE_SWEEP_N, vec![Case1AlignNearest, Case2AlignFarthest]),
        "fig2b" => (
            &RATE_SWEEP_N,
            vec![Case2AlignFarthest, Case3Random, Case4Identity],
        ),
        "fig3a" => (
            &DESIGN_SWEEP_N,
            vec![
                Case1AlignNearest,
                Case2AlignFarthest,
                Case3Random,
                Case5Maxsum,
            ],
        ),
        _ => (
            &DESIGN_SWEEP_N,
            vec![
                Case1AlignNearest,
                Case2AlignFarthest,
                Case3Random,
                Case5Maxsum,
                Case6Maxmin,
            ],
        ),
    }
}

/// Writes the data of `figure` into `options.out_dir` and returns the paths
/// of the data files (each has a `.manifest.json` sidecar).
pub fn reproduce(figure: &str, options: &ReproduceOptions) -> Result<Vec<PathBuf>> {
    if !FIGURES.contains(&figure) {
        return Err(Error::InvalidConfig(format!(
            "unknown figure {figure:?}; expected one of {FIGURES:?}"
        )));
    }
    options.config.validate()?;
    fs::create_dir_all(&options.out_dir)?;
    let command = format!("reproduce {figure}");
    let base = |design: PhaseDesign| {
        Scenario::new(options.config.clone(), design)
            .with_trials(options.trials)
            .with_seed(options.seed)
    };
    match figure {
        "fig4a" => {
            let k = farthest_user(&options.config);
            let rows = tradeoff_table(&options.config, k, TRADEOFF_SNR, &TRADEOFF_N)?;
            let path = options.out_dir.join("fig4a.csv");
            write_table(&path, &rows)?;
            let mut cfg = options.config.clone();
            cfg.delta = 0.0;
            let s = Scenario::new(cfg, PhaseDesign::Case4Identity)
                .with_seed(options.seed)
                .with_sweep(SweepAxis::N, TRADEOFF_N.iter().map(|&n| n as f64).collect());
            write_manifest(&Manifest::new(&command, &s, &path, &[]), &path)?;
            Ok(vec![path])
        }
        "fig4b" => {
            let rows = power_scaling_table(
                &options.config,
                &POWER_SCALING_M,
                &POWER_SCALING_N,
                POWER_SCALING_EU,
            )?;
            let path = options.out_dir.join("fig4b.csv");
            write_table(&path, &rows)?;
            let s = base(PhaseDesign::Case4Identity).with_sweep(
                SweepAxis::N,
                POWER_SCALING_N.iter().map(|&n| n as f64).collect(),
            );
            write_manifest(&Manifest::new(&command, &s, &path, &[]), &path)?;
            Ok(vec![path])
        }
        _ => {
            let (ns, designs) = designs(figure);
            let mut paths = Vec::new();
            for d in designs {
                let path = options.out_dir.join(format!("{figure}_{}.csv", d.name()));
                let s = base(d).with_sweep(SweepAxis::N, ns.to_vec());
                let rows = run_scenario(&s)?;
                save_run(&path, Format::Csv, &command, &s, &rows)?;
                paths.push(path);
            }
            Ok(paths)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::small_config;

    #[test]
    fn bisection_hits_target() {
        let mut cfg = small_config();
        cfg.delta = 0.0;
        let snr = |mm: usize| {
            let mut c = cfg.clone();
            c.m = mm;
            RateModel::new(&c).unwrap().lb2_snr()[1]
        };
        let target = 37.3 * snr(cfg.k + 1);
        let m = antennas_for_snr(&cfg, 1, target).unwrap();
        assert!((m - (cfg.k as f64 + 37.3)).abs() < 1e-9);
        let lo = m.floor() as usize;
        assert!(snr(lo) < target && snr(lo + 1) >= target);
    }

    #[test]
    fn unknown_figure() {
        let dir = std::env::temp_dir().join("rislab-unknown-figure");
        assert!(matches!(
            reproduce("fig9", &ReproduceOptions::new(dir)),
            Err(Error::InvalidConfig(_))
        ));
    }
}
