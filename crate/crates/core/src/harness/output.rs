//! CSV/JSON persistence of result rows and the run manifest.
//!
//! CSV layout (schema version 1): one [`ResultRow`] per line with the fixed
//! header [`CSV_HEADER`]. Per-user quantities are `;`-separated lists inside
//! a single field. Numbers use the shortest decimal form that parses back to
//! the same `f64`; NaN is written as an empty field. Wall time is kept out of
//! the CSV so that reruns with the same seed give identical bytes; it is
//! recorded in the manifest instead.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::scenario::{ResultRow, Scenario, SweepAxis};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: [&str; 21] = [
    "sweep_axis",
    "sweep_value",
    "design",
    "status",
    "trials",
    "seed",
    "iterations",
    "rejected_trials",
    "sum_mc_rate",
    "sum_mc_rate_std_err",
    "min_mc_rate",
    "min_mc_rate_std_err",
    "sum_lb",
    "min_lb",
    "mc_rate",
    "mc_rate_std_err",
    "lb",
    "lb2",
    "lb2_approx",
    "ub",
    "ub_aligned",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Serialize, Deserialize)]
struct CsvRecord {
    sweep_axis: String,
    sweep_value: Option<f64>,
    design: String,
    status: String,
    trials: usize,
    seed: u64,
    iterations: usize,
    rejected_trials: usize,
    sum_mc_rate: Option<f64>,
    sum_mc_rate_std_err: Option<f64>,
    min_mc_rate: Option<f64>,
    min_mc_rate_std_err: Option<f64>,
    sum_lb: Option<f64>,
    min_lb: Option<f64>,
    mc_rate: String,
    mc_rate_std_err: String,
    lb: String,
    lb2: String,
    lb2_approx: String,
    ub: String,
    ub_aligned: String,
}

fn opt(x: f64) -> Option<f64> {
    (!x.is_nan()).then_some(x)
}

fn join(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

fn split(s: &str) -> Result<Vec<f64>> {
    if s.is_empty() {
        return Ok(vec![]);
    }
    s.split(';')
        .map(|x| {
            x.parse()
                .map_err(|_| Error::Parse(format!("bad list entry {x:?}")))
        })
        .collect()
}

fn axis_from_name(name: &str) -> Result<Option<SweepAxis>> {
    Ok(match name {
        "" => None,
        "N" => Some(SweepAxis::N),
        "M" => Some(SweepAxis::M),
        "p" => Some(SweepAxis::P),
        "delta" => Some(SweepAxis::Delta),
        "bits" => Some(SweepAxis::Bits),
        other => return Err(Error::Parse(format!("unknown sweep axis {other:?}"))),
    })
}

impl From<&ResultRow> for CsvRecord {
    fn from(r: &ResultRow) -> Self {
        CsvRecord {
            sweep_axis: r.sweep_axis.map_or("", |a| a.name()).to_string(),
            sweep_value: r.sweep_value,
            design: r.design.clone(),
            status: r.status.clone(),
            trials: r.trials,
            seed: r.seed,
            iterations: r.iterations,
            rejected_trials: r.rejected_trials,
            sum_mc_rate: opt(r.sum_mc_rate),
            sum_mc_rate_std_err: opt(r.sum_mc_rate_std_err),
            min_mc_rate: opt(r.min_mc_rate),
            min_mc_rate_std_err: opt(r.min_mc_rate_std_err),
            sum_lb: opt(r.sum_lb),
            min_lb: opt(r.min_lb),
            mc_rate: join(&r.mc_rate),
            mc_rate_std_err: join(&r.mc_rate_std_err),
            lb: join(&r.lb),
            lb2: join(&r.lb2),
            lb2_approx: join(&r.lb2_approx),
            ub: join(&r.ub),
            ub_aligned: join(&r.ub_aligned),
        }
    }
}

impl CsvRecord {
    fn into_row(self) -> Result<ResultRow> {
        let nan = |x: Option<f64>| x.unwrap_or(f64::NAN);
        Ok(ResultRow {
            sweep_axis: axis_from_name(&self.sweep_axis)?,
            sweep_value: self.sweep_value,
            design: self.design,
            status: self.status,
            trials: self.trials,
            seed: self.seed,
            iterations: self.iterations,
            rejected_trials: self.rejected_trials,
            mc_rate: split(&self.mc_rate)?,
            mc_rate_std_err: split(&self.mc_rate_std_err)?,
            lb: split(&self.lb)?,
            lb2: split(&self.lb2)?,
            lb2_approx: split(&self.lb2_approx)?,
            ub: split(&self.ub)?,
            ub_aligned: split(&self.ub_aligned)?,
            sum_mc_rate: nan(self.sum_mc_rate),
            sum_mc_rate_std_err: nan(self.sum_mc_rate_std_err),
            min_mc_rate: nan(self.min_mc_rate),
            min_mc_rate_std_err: nan(self.min_mc_rate_std_err),
            sum_lb: nan(self.sum_lb),
            min_lb: nan(self.min_lb),
            wall_time_ms: 0.0,
        })
    }
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    for r in rows {
        w.serialize(CsvRecord::from(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Parses CSV written by [`write_csv`]. Wall time reads back as zero.
pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Parse(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize::<CsvRecord>()
        .map(|rec| rec?.into_row())
        .collect()
}

pub fn write_rows<W: Write>(rows: &[ResultRow], format: Format, mut out: W) -> Result<()> {
    match format {
        Format::Csv => write_csv(rows, out),
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)?;
            Ok(())
        }
    }
}

/// Everything needed to rerun a sweep and recreate its output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub package_version: String,
    pub command: String,
    pub scenario: Scenario,
    pub rng: String,
    pub output: String,
    pub wall_time_ms: Vec<f64>,
}

impl Manifest {
    pub fn new(command: &str, scenario: &Scenario, output: &Path, rows: &[ResultRow]) -> Self {
        Manifest {
            schema_version: SCHEMA_VERSION,
            package_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            scenario: scenario.clone(),
            rng: "ChaCha8, per-trial stream t + (attempt << 40) from the scenario seed".into(),
            output: output
                .file_name()
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or_default(),
            wall_time_ms: rows.iter().map(|r| r.wall_time_ms).collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_reader(File::open(path)?)?)
    }
}

/// `results.csv` → `results.csv.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes `rows` to `path` and the manifest next to it.
pub fn save_run(
    path: &Path,
    format: Format,
    command: &str,
    scenario: &Scenario,
    rows: &[ResultRow],
) -> Result<()> {
    write_rows(rows, format, File::create(path)?)?;
    write_manifest(&Manifest::new(command, scenario, path, rows), path)
}

pub fn write_manifest(manifest: &Manifest, output: &Path) -> Result<()> {
    let mut f = File::create(manifest_path(output))?;
    serde_json::to_writer_pretty(&mut f, manifest)?;
    writeln!(f)?;
    Ok(())
}
