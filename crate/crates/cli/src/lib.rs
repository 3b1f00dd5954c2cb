//! Command-line front end for the Sauter-well pair-creation solver.
//!
//! Subcommands `bound-states`, `evolve`, `sweep` and `peaks` each print a
//! one-line summary to standard output and write CSV files plus a JSON
//! manifest into the output directory. Exit codes: 0 success, 2
//! configuration error, 3 numerical abort, 4 partial sweep failure, 1 I/O.

pub mod commands;
pub mod error;
pub mod manifest;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use sauter_core::bound_states::{predict_peaks, solve_bound_states};
use sauter_core::SimulationConfig;

use crate::commands::{
    load_config, run_bound_states, run_evolve, run_peaks, run_sweep, EvolveOptions, PeaksOptions,
    SweepPlan, DEFAULT_MATCH_TOLERANCE_C2,
};
pub use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "sauter", version, about = "Pair creation in Sauter potential wells")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Configuration file (`key = value` lines) or a previous run's manifest.json.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Well shape.
    #[arg(long, value_name = "two-sided|one-sided")]
    pub well: Option<String>,
    /// Left-edge width; a trailing `le` means units of λ_e = 1/c.
    #[arg(long = "W2", value_name = "VALUE[le]")]
    pub w2: Option<String>,
    #[arg(long = "Nz", value_name = "N")]
    pub nz: Option<String>,
    #[arg(long = "Nt", value_name = "N")]
    pub nt: Option<String>,
    #[arg(long = "sample-stride", value_name = "N")]
    pub sample_stride: Option<String>,
    /// Any other configuration key, e.g. `--set V1=0`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Worker threads for the column-parallel propagation.
    #[arg(long, value_name = "N")]
    pub threads: Option<usize>,
}

impl CommonArgs {
    /// Command-line overrides in application order (later entries win).
    pub fn overrides(&self) -> Result<Vec<(String, String)>, CliError> {
        let mut out = Vec::new();
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        let flags = [
            ("well_shape", &self.well),
            ("W2", &self.w2),
            ("Nz", &self.nz),
            ("Nt", &self.nt),
            ("sample_stride", &self.sample_stride),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                out.push((key.to_string(), v.clone()));
            }
        }
        Ok(out)
    }

    pub fn load(&self) -> Result<SimulationConfig, CliError> {
        let (config, warnings) = load_config(self.config.as_deref(), &self.overrides()?)?;
        for w in warnings {
            eprintln!("warning: {w}");
        }
        Ok(config)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the well's bound-state ladder and print it.
    BoundStates {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run one propagation; writes spectrum, time series and density.
    Evolve {
        #[command(flatten)]
        common: CommonArgs,
        /// Density snapshot times (a.u., or with a `/c2` suffix), comma separated.
        #[arg(long = "density-times", value_name = "t1,t2,...")]
        density_times: Option<String>,
        /// Also store the final U_pn as a binary checkpoint.
        #[arg(long)]
        checkpoint: bool,
    },
    /// Run one propagation per left-edge width W2.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// W2 values in units of λ_e, comma separated.
        #[arg(long = "W2-values", value_name = "w1,w2,...")]
        w2_values: Option<String>,
        #[arg(long = "density-times", value_name = "t1,t2,...")]
        density_times: Option<String>,
    },
    /// Match spectrum peaks against bound-state + n-photon predictions.
    Peaks {
        #[command(flatten)]
        common: CommonArgs,
        /// Spectrum CSV; defaults to OUT/spectrum.csv, computed if missing.
        #[arg(long, value_name = "PATH")]
        spectrum: Option<PathBuf>,
        /// Mode range `a:b` to scan for peaks; defaults to the predicted modes ± 10.
        #[arg(long, value_name = "a:b", allow_hyphen_values = true)]
        range: Option<String>,
        #[arg(long = "n-photons", value_name = "N", default_value_t = 1)]
        n_photons: u32,
        /// Matching tolerance in units of c².
        #[arg(long, value_name = "C2", default_value_t = DEFAULT_MATCH_TOLERANCE_C2)]
        tolerance: f64,
    },
}

/// Parses `a:b` into an inclusive mode range.
pub fn parse_range(s: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::Config(format!("--range expects a:b with integers, got {s:?}"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let a = a.trim().parse().map_err(|_| bad())?;
    let b = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

/// Parses a comma-separated list of times; a `/c2` suffix divides by `c²`.
pub fn parse_times(s: &str, c: f64) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|item| {
            let item = item.trim();
            let (digits, scale) = match item.strip_suffix("/c2") {
                Some(d) => (d, 1.0 / (c * c)),
                None => (item, 1.0),
            };
            digits
                .trim()
                .parse::<f64>()
                .map(|x| x * scale)
                .map_err(|_| CliError::Config(format!("bad time {item:?}")))
        })
        .collect()
}

/// Comma-separated positive numbers.
pub fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|item| {
            item.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("bad number {item:?}")))
        })
        .collect()
}

/// Predicted peak modes for `n_photons`, widened by 10 modes each side.
pub fn default_range(config: &SimulationConfig, n_photons: u32) -> Result<(i64, i64), CliError> {
    let bound = solve_bound_states(config.c, config.v1, config.well_width)?;
    let predicted = predict_peaks(&bound, config.omega, n_photons, config.box_length);
    let modes = predicted.peaks.iter().map(|p| p.mode);
    let lo = modes.clone().fold(f64::INFINITY, f64::min);
    let hi = modes.fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() {
        return Err(CliError::Config(format!(
            "no level reaches the continuum with {n_photons} photon(s); pass --range"
        )));
    }
    Ok((lo.floor() as i64 - 10, hi.ceil() as i64 + 10))
}

fn configure_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Runs one parsed command line and returns the summary line.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::BoundStates { common } => {
            let config = common.load()?;
            let outcome = run_bound_states(&config, Some(&common.out))?;
            Ok(format!("{}{}", outcome.table(), outcome.summary()))
        }
        Command::Evolve {
            common,
            density_times,
            checkpoint,
        } => {
            configure_threads(common.threads);
            let config = common.load()?;
            let opts = EvolveOptions {
                out: common.out.clone(),
                density_times: match density_times {
                    Some(s) => parse_times(s, config.c)?,
                    None => Vec::new(),
                },
                checkpoint: *checkpoint,
            };
            Ok(run_evolve(&config, &opts)?.summary())
        }
        Command::Sweep {
            common,
            w2_values,
            density_times,
        } => {
            configure_threads(common.threads);
            let config = common.load()?;
            let values = match w2_values {
                Some(s) => parse_list(s)?,
                None => SweepPlan::DEFAULT_W2.to_vec(),
            };
            let mut plan = SweepPlan::new(config, values, common.out.clone())?;
            if let Some(s) = density_times {
                plan.density_times = parse_times(s, plan.base.c)?;
            }
            let outcome = run_sweep(&plan)?;
            let summary = outcome.summary();
            if outcome.failures() > 0 {
                println!("{summary}");
                return Err(CliError::PartialSweep {
                    failed: outcome.failures(),
                    total: outcome.rows.len(),
                });
            }
            Ok(summary)
        }
        Command::Peaks {
            common,
            spectrum,
            range,
            n_photons,
            tolerance,
        } => {
            configure_threads(common.threads);
            let config = common.load()?;
            let range = match range {
                Some(s) => parse_range(s)?,
                None => default_range(&config, *n_photons)?,
            };
            let opts = PeaksOptions {
                out: common.out.clone(),
                spectrum: spectrum.clone(),
                n_photons: *n_photons,
                range,
                tolerance_c2: *tolerance,
            };
            Ok(run_peaks(&config, &opts)?.summary())
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    match run(cli) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
