//! Flat `key = value` scenario files.
//!
//! ```text
//! # reference layout with a different seed and an N sweep
//! profile = reference
//! layout_seed = 3
//! p = 20 dBm
//! sigma2 = -104 dBm
//! design = case1
//! sweep = N
//! sweep_values = 64, 128, 256
//! trials = 500
//! ```
//!
//! Every file starts from the reference profile. `K` or `layout_seed`
//! regenerate the ring layout (path losses and angles) before the explicit
//! keys are applied, so `alpha`, `gamma` or angle lists given in the same
//! file win. Powers need a `dBm` or `W` suffix. Angles are in radians.

use std::collections::BTreeMap;
use std::path::Path;

use super::scenario::{PhaseDesign, Scenario, Sweep, SweepAxis};
use crate::channel::{
    dbm_to_watts, Angles, DeploymentGeometry, PathLossModel, SystemConfig, DEFAULT_PROFILE_SEED,
};
use crate::{Error, Result};

const KEYS: &[&str] = &[
    "profile",
    "layout_seed",
    "m",
    "n",
    "k",
    "tau_c",
    "tau",
    "p",
    "sigma2",
    "delta",
    "beta",
    "alpha",
    "gamma",
    "user_ris_azimuth",
    "user_ris_elevation",
    "ris_aod",
    "bs_aoa",
    "d_over_lambda",
    "mu",
    "design",
    "phases",
    "nearest_user",
    "farthest_user",
    "sweep",
    "sweep_values",
    "trials",
    "seed",
    "mm_max_iter",
    "mm_rel_tol",
    "mm_max_backtracks",
];

fn bad(key: &str, value: &str, what: &str) -> Error {
    Error::Parse(format!("{key} = {value}: {what}"))
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| bad(key, value, "not a valid number"))
}

fn list(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|x| number(key, x)).collect()
}

/// `"30 dBm"`, `"-104dBm"` or `"1e-3 W"`, returned in watts.
pub fn parse_power(key: &str, value: &str) -> Result<f64> {
    let v = value.trim();
    if let Some(x) = v.strip_suffix("dBm") {
        Ok(dbm_to_watts(number(key, x)?))
    } else if let Some(x) = v.strip_suffix('W') {
        number(key, x)
    } else {
        Err(bad(key, value, "power needs a dBm or W suffix"))
    }
}

fn angles(key: &str, value: &str) -> Result<Angles> {
    match list(key, value)?.as_slice() {
        [az, el] => Ok(Angles::new(*az, *el)),
        _ => Err(bad(key, value, "expected azimuth, elevation")),
    }
}

fn design(value: &str, phases: Option<&String>) -> Result<PhaseDesign> {
    let d = match value.trim() {
        "case1" | "case1_align_nearest" => PhaseDesign::Case1AlignNearest,
        "case2" | "case2_align_farthest" => PhaseDesign::Case2AlignFarthest,
        "case3" | "case3_random" => PhaseDesign::Case3Random,
        "case4" | "case4_identity" => PhaseDesign::Case4Identity,
        "case5" | "case5_maxsum" => PhaseDesign::Case5Maxsum,
        "case6" | "case6_maxmin" => PhaseDesign::Case6Maxmin,
        "explicit" => {
            let p = phases
                .ok_or_else(|| Error::Parse("design = explicit needs a phases list".into()))?;
            PhaseDesign::Explicit(list("phases", p)?)
        }
        other => return Err(bad("design", other, "unknown design")),
    };
    Ok(d)
}

fn axis(value: &str) -> Result<SweepAxis> {
    match value.trim() {
        "N" | "n" => Ok(SweepAxis::N),
        "M" | "m" => Ok(SweepAxis::M),
        "p" => Ok(SweepAxis::P),
        "delta" => Ok(SweepAxis::Delta),
        "bits" => Ok(SweepAxis::Bits),
        other => Err(bad("sweep", other, "unknown axis")),
    }
}

/// Splits the text into a key map. Keys are case-insensitive; `#` starts a
/// comment; duplicates and unknown keys are errors.
fn entries(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", i + 1)))?;
        let key = key.trim().to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::Parse(format!("line {}: unknown key {key}", i + 1)));
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(Error::Parse(format!("line {}: duplicate key {key}", i + 1)));
        }
    }
    Ok(map)
}

/// Parses a scenario file body. The result is not validated.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let map = entries(text)?;
    let get = |k: &str| map.get(k);
    if let Some(p) = get("profile") {
        if p != "reference" {
            return Err(bad("profile", p, "only the reference profile exists"));
        }
    }
    let mut cfg = SystemConfig::reference();
    if get("k").is_some() || get("layout_seed").is_some() {
        let k = get("k")
            .map(|v| number("k", v))
            .transpose()?
            .unwrap_or(cfg.k);
        let seed = get("layout_seed")
            .map(|v| number("layout_seed", v))
            .transpose()?
            .unwrap_or(DEFAULT_PROFILE_SEED);
        DeploymentGeometry::ring(k, seed).apply(&PathLossModel::default(), &mut cfg);
        cfg.tau = k;
    }
    for (key, value) in &map {
        let v = value.as_str();
        match key.as_str() {
            "m" => cfg.m = number(key, v)?,
            "n" => cfg.n = number(key, v)?,
            "tau_c" => cfg.tau_c = number(key, v)?,
            "tau" => cfg.tau = number(key, v)?,
            "p" => cfg.p = parse_power(key, v)?,
            "sigma2" => cfg.sigma2 = parse_power(key, v)?,
            "delta" => cfg.delta = number(key, v)?,
            "beta" => cfg.beta = number(key, v)?,
            "alpha" => cfg.alpha = list(key, v)?,
            "gamma" => cfg.gamma = list(key, v)?,
            "ris_aod" => cfg.ris_aod = angles(key, v)?,
            "bs_aoa" => cfg.bs_aoa = angles(key, v)?,
            "d_over_lambda" => cfg.d_over_lambda = number(key, v)?,
            "mu" => cfg.mu = number(key, v)?,
            _ => {}
        }
    }
    match (get("user_ris_azimuth"), get("user_ris_elevation")) {
        (Some(az), Some(el)) => {
            let az = list("user_ris_azimuth", az)?;
            let el = list("user_ris_elevation", el)?;
            if az.len() != el.len() {
                return Err(Error::Parse(
                    "user_ris_azimuth and user_ris_elevation differ in length".into(),
                ));
            }
            cfg.user_ris_angles = az
                .iter()
                .zip(&el)
                .map(|(a, e)| Angles::new(*a, *e))
                .collect();
        }
        (None, None) => {}
        _ => {
            return Err(Error::Parse(
                "user_ris_azimuth and user_ris_elevation go together".into(),
            ))
        }
    }

    let design = design(get("design").map_or("case4", |s| s.as_str()), get("phases"))?;
    let mut scenario = Scenario::new(cfg, design);
    match (get("sweep"), get("sweep_values")) {
        (Some(a), Some(values)) => {
            let axis = axis(a)?;
            let values = if axis == SweepAxis::P {
                values
                    .split(',')
                    .map(|x| parse_power("sweep_values", x))
                    .collect::<Result<_>>()?
            } else {
                list("sweep_values", values)?
            };
            scenario.sweep = Some(Sweep { axis, values });
        }
        (None, None) => {}
        _ => return Err(Error::Parse("sweep and sweep_values go together".into())),
    }
    if let Some(v) = get("trials") {
        scenario.trials = number("trials", v)?;
    }
    if let Some(v) = get("seed") {
        scenario.seed = number("seed", v)?;
    }
    if let Some(v) = get("nearest_user") {
        scenario.nearest_user = Some(number("nearest_user", v)?);
    }
    if let Some(v) = get("farthest_user") {
        scenario.farthest_user = Some(number("farthest_user", v)?);
    }
    if let Some(v) = get("mm_max_iter") {
        scenario.mm.max_iter = number("mm_max_iter", v)?;
    }
    if let Some(v) = get("mm_rel_tol") {
        scenario.mm.rel_tol = number("mm_rel_tol", v)?;
    }
    if let Some(v) = get("mm_max_backtracks") {
        scenario.mm.max_backtracks = number("mm_max_backtracks", v)?;
    }
    Ok(scenario)
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    parse_scenario(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_reference() {
        let s = parse_scenario("# nothing\n\n").unwrap();
        assert_eq!(s.config, SystemConfig::reference());
        assert_eq!(s.design, PhaseDesign::Case4Identity);
        assert_eq!(s.trials, 2000);
        assert!(s.sweep.is_none());
    }

    #[test]
    fn powers_and_lists() {
        let s = parse_scenario(
            "K = 2\nalpha = 1e-6, 2e-6\ngamma = 1e-9,1e-9\np = 20 dBm\nsigma2 = 1e-12 W\n\
             sweep = p\nsweep_values = 0 dBm, 10dBm\ndesign = case2\nseed = 7",
        )
        .unwrap();
        assert_eq!(s.config.k, 2);
        assert_eq!(s.config.alpha, vec![1e-6, 2e-6]);
        assert!((s.config.p - 0.1).abs() < 1e-15);
        assert_eq!(s.config.sigma2, 1e-12);
        let sweep = s.sweep.unwrap();
        assert_eq!(sweep.axis, SweepAxis::P);
        assert!((sweep.values[0] - 1e-3).abs() < 1e-18 && (sweep.values[1] - 1e-2).abs() < 1e-17);
        assert_eq!(s.design, PhaseDesign::Case2AlignFarthest);
        assert_eq!(s.seed, 7);
        assert!(s.config.validate().is_ok());
    }

    #[test]
    fn explicit_angles() {
        let s = parse_scenario(
            "N = 2\ndesign = explicit\nphases = 0.5, 1.5\nris_aod = 0.1, 0.2\n\
             K = 2\nuser_ris_azimuth = 1, 2\nuser_ris_elevation = 3, 4",
        )
        .unwrap();
        assert_eq!(s.design, PhaseDesign::Explicit(vec![0.5, 1.5]));
        assert_eq!(s.config.ris_aod, Angles::new(0.1, 0.2));
        assert_eq!(s.config.user_ris_angles[1], Angles::new(2.0, 4.0));
    }

    #[test]
    fn rejects_malformed_input() {
        for text in [
            "p = 30",
            "bogus = 1",
            "M = 1\nm = 2",
            "M = sixty",
            "sweep = N",
            "design = case9",
            "design = explicit",
            "ris_aod = 1",
            "user_ris_azimuth = 1",
            "profile = other",
            "no equals sign",
        ] {
            assert!(
                matches!(parse_scenario(text), Err(Error::Parse(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn layout_seed_changes_angles_only_through_geometry() {
        let a = parse_scenario("layout_seed = 0").unwrap();
        assert_eq!(a.config, SystemConfig::reference());
        let b = parse_scenario("layout_seed = 1").unwrap();
        assert_ne!(b.config.user_ris_angles, a.config.user_ris_angles);
        assert_eq!(b.config.k, 8);
    }
}
