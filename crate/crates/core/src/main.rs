use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rislab::estimation::mmse_coefficients;
use rislab::harness::{
    load_scenario, reproduce, resolve_design, run_scenario, run_single, save_run, write_rows,
    Format, PhaseDesign, ReproduceOptions, Scenario,
};
use rislab::rate::RateModel;
use rislab::{Error, Result, SystemConfig};

/// Trial count used by `--full-trials`.
const FULL_TRIALS: usize = 10_000;

#[derive(Parser)]
#[command(
    name = "rislab",
    version,
    about = "RIS-aided massive MIMO uplink simulator"
)]
struct Cli {
    /// Scenario file (`key = value` lines); the reference scenario if omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Run figure reproduction at the full trial count.
    #[arg(long, global = true)]
    full_trials: bool,
    /// Output file, or output directory for `reproduce`. Stdout if omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Csv)]
    format: OutFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo rate and closed-form bounds at the base point.
    Rate,
    /// MMSE estimation coefficients per user.
    Mse,
    /// Phase-shift design (Max-Min for case6, Max-Sum otherwise).
    Optimize,
    /// Every point of the scenario's sweep.
    Sweep,
    /// Data behind one of the standard figures.
    Reproduce { figure: String },
}

fn scenario(cli: &Cli) -> Result<Scenario> {
    let mut s = match &cli.config {
        Some(path) => load_scenario(path).map_err(|e| match e {
            Error::Io(io) => Error::InvalidConfig(format!("{}: {io}", path.display())),
            e => e,
        })?,
        None => Scenario::new(SystemConfig::reference(), PhaseDesign::Case4Identity),
    };
    if let Some(seed) = cli.seed {
        s.seed = seed;
    }
    if let Some(trials) = cli.trials {
        s.trials = trials;
    }
    if cli.full_trials {
        s.trials = FULL_TRIALS;
    }
    s.validate()?;
    Ok(s)
}

fn emit<T: Serialize>(out: Option<&Path>, format: Format, rows: &[T]) -> Result<()> {
    let w: Box<dyn Write> = match out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(w);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut w = w;
            serde_json::to_writer_pretty(&mut w, rows)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct MseRow {
    user: usize,
    alpha: f64,
    gamma: f64,
    variance: f64,
    kappa: f64,
    epsilon: f64,
    normalized_mse: f64,
}

#[derive(Serialize)]
struct PhaseRow {
    element: usize,
    theta: f64,
}

#[derive(Serialize)]
struct DesignSummary {
    design: String,
    iterations: usize,
    lb: Vec<f64>,
    sum_lb: f64,
    min_lb: f64,
    thetas: Vec<f64>,
}

fn run(cli: &Cli) -> Result<()> {
    let format = Format::from(cli.format);
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Reproduce { figure } => {
            let base = scenario(cli)?;
            let mut options =
                ReproduceOptions::new(cli.out.clone().unwrap_or_else(|| PathBuf::from("figures")));
            options.config = base.config;
            options.seed = base.seed;
            options.trials = base.trials;
            for path in reproduce(figure, &options)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Rate | Command::Sweep => {
            let mut s = scenario(cli)?;
            let (name, rows) = match cli.command {
                Command::Rate => {
                    s.sweep = None;
                    ("rate", vec![run_single(&s)?])
                }
                _ if s.sweep.is_none() => {
                    return Err(Error::InvalidConfig(
                        "sweep needs `sweep` and `sweep_values` in the config".into(),
                    ))
                }
                _ => ("sweep", run_scenario(&s)?),
            };
            match out {
                Some(p) => save_run(p, format, name, &s, &rows),
                None => write_rows(&rows, format, io::stdout().lock()),
            }
        }
        Command::Mse => {
            let s = scenario(cli)?;
            let c = &s.config;
            let coef = mmse_coefficients(c)?;
            let rows: Vec<MseRow> = (0..c.k)
                .map(|k| MseRow {
                    user: k,
                    alpha: c.alpha[k],
                    gamma: c.gamma[k],
                    variance: coef.variance[k],
                    kappa: coef.kappa[k],
                    epsilon: coef.epsilon[k],
                    normalized_mse: coef.epsilon[k] / coef.variance[k],
                })
                .collect();
            emit(out, format, &rows)
        }
        Command::Optimize => {
            let s = scenario(cli)?;
            let design = match s.design {
                PhaseDesign::Case6Maxmin => PhaseDesign::Case6Maxmin,
                _ => PhaseDesign::Case5Maxsum,
            };
            s.config.validate()?;
            let resolved = resolve_design(&s, &s.config, &design)?;
            let lb = RateModel::new(&s.config)?.lower_bound(&resolved.phase)?;
            let summary = DesignSummary {
                design: design.name().into(),
                iterations: resolved.iterations,
                sum_lb: lb.iter().sum(),
                min_lb: lb.iter().copied().fold(f64::INFINITY, f64::min),
                lb,
                thetas: resolved.phase.thetas(),
            };
            eprintln!(
                "{}: {} iterations, sum {:.6}, min {:.6} bits/s/Hz",
                summary.design, summary.iterations, summary.sum_lb, summary.min_lb
            );
            match format {
                Format::Json => emit(out, format, &[summary]),
                Format::Csv => {
                    let rows: Vec<PhaseRow> = summary
                        .thetas
                        .iter()
                        .enumerate()
                        .map(|(element, &theta)| PhaseRow { element, theta })
                        .collect();
                    emit(out, format, &rows)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
