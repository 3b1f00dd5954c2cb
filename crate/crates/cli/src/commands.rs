//! The four run modes: bound-state ladder, single evolution, W2 sweep and
//! multi-photon peak assignment. Each has a pure `compute_*`/`analyze_*`
//! part and a `run_*` part that writes files and a manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use sauter_core::bound_states::{
    detect_peaks, match_peaks, predict_peaks, solve_bound_states, DetectOptions,
};
use sauter_core::observables::momentum_spectrum;
use sauter_core::propagator::{evolve_all, Diagnostics, MatrixRetention};
use sauter_core::{
    BoundStateSet, DensityResult, EvolutionSchedule, FieldSampler, FreeBasis, Grid, PeakMatchReport,
    SimulationConfig, SpectrumResult, TimeSeriesResult, TransitionMatrix,
};

use crate::error::CliError;
use crate::manifest::{unix_now, RunManifest};
use crate::output::{number, text_field, Csv};

pub const BOUND_STATES_FILE: &str = "bound_states.csv";
pub const SPECTRUM_FILE: &str = "spectrum.csv";
pub const TIMESERIES_FILE: &str = "timeseries.csv";
pub const DENSITY_FILE: &str = "density.csv";
pub const MATCHES_FILE: &str = "matches.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const CHECKPOINT_FILE: &str = "U_final.bin";
pub const PEAKS_MANIFEST_FILE: &str = "manifest_peaks.json";

/// Reads a configuration file (or a run manifest, whose resolved
/// configuration is reused) and applies `overrides`. `None` means the
/// built-in defaults.
pub fn load_config(
    path: Option<&Path>,
    overrides: &[(String, String)],
) -> Result<(SimulationConfig, Vec<String>), CliError> {
    let text = match path {
        None => String::new(),
        Some(p) => {
            let raw = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            if raw.trim_start().starts_with('{') {
                RunManifest::parse(&raw)?.config_text()
            } else {
                raw
            }
        }
    };
    let config = SimulationConfig::parse(&text, overrides)?;
    let warnings = config.validate()?;
    Ok((config, warnings))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

// ---------------------------------------------------------------- bound states

pub fn bound_states_csv(set: &BoundStateSet) -> Csv {
    let c2 = set.c * set.c;
    let mut csv = Csv::new(&["i", "E", "E_over_c2", "relative_residual"]);
    for (i, (&e, &r)) in set.energies.iter().zip(&set.relative_residuals).enumerate() {
        csv.row(&[(i + 1).to_string(), number(e), number(e / c2), number(r)]);
    }
    csv
}

pub struct BoundStatesOutcome {
    pub set: BoundStateSet,
    pub elapsed_s: f64,
}

impl BoundStatesOutcome {
    pub fn table(&self) -> String {
        let c2 = self.set.c * self.set.c;
        let mut s = String::from("  i             E [a.u.]        E [c^2]\n");
        for (i, e) in self.set.energies.iter().enumerate() {
            s.push_str(&format!("{:>3} {:>20.6} {:>14.6}\n", i + 1, e, e / c2));
        }
        s
    }

    pub fn summary(&self) -> String {
        format!(
            "bound-states: {} levels, E_1 = {:.4} c^2, E_{} = {:.4} c^2 ({:.3} s)",
            self.set.len(),
            self.set.in_c2()[0],
            self.set.len(),
            self.set.in_c2()[self.set.len() - 1],
            self.elapsed_s
        )
    }
}

pub fn run_bound_states(config: &SimulationConfig, out: Option<&Path>) -> Result<BoundStatesOutcome, CliError> {
    let started = unix_now();
    let clock = Instant::now();
    let set = solve_bound_states(config.c, config.v1, config.well_width)?;
    let elapsed_s = clock.elapsed().as_secs_f64();
    if let Some(dir) = out {
        create_dir(dir)?;
        let mut manifest = RunManifest::new("bound-states", config, started);
        manifest.write_output(dir, BOUND_STATES_FILE, bound_states_csv(&set).as_bytes())?;
        manifest.metrics.insert("levels".into(), set.len() as f64);
        manifest.finish(dir)?;
    }
    Ok(BoundStatesOutcome { set, elapsed_s })
}

// ---------------------------------------------------------------- evolve

/// Everything one propagation run produces.
#[derive(Debug, Clone)]
pub struct EvolveOutcome {
    pub config: SimulationConfig,
    pub spectrum: SpectrumResult,
    pub timeseries: TimeSeriesResult,
    pub densities: Vec<DensityResult>,
    pub diagnostics: Diagnostics,
    pub final_matrix: TransitionMatrix,
    pub elapsed_s: f64,
}

impl EvolveOutcome {
    pub fn final_number(&self) -> f64 {
        self.timeseries.last().unwrap_or(0.0)
    }

    pub fn summary(&self) -> String {
        let (pos, neg) = self.spectrum.side_totals();
        format!(
            "evolve: Nz = {}, Nt = {}, N(T) = {}, N+/N- = {:.6}, max norm drift = {:.3e} ({:.2} s)",
            self.config.nz,
            self.config.nt,
            number(self.final_number()),
            if neg > 0.0 { pos / neg } else { f64::NAN },
            self.diagnostics.max_norm_drift,
            self.elapsed_s
        )
    }
}

/// Propagates every negative-energy mode for `config`. Density snapshots are
/// taken at `density_times` (atomic units), or at `T` when the list is empty.
pub fn compute_evolve(config: &SimulationConfig, density_times: &[f64]) -> Result<EvolveOutcome, CliError> {
    config.validate()?;
    let total = config.total_time();
    if let Some(t) = density_times.iter().find(|t| !(0.0..=total).contains(*t)) {
        return Err(CliError::Config(format!(
            "density-times: {t} outside [0, T = {total}]"
        )));
    }
    let clock = Instant::now();
    let grid = Grid::from_config(config)?;
    let basis = FreeBasis::new(&grid, config.c);
    let sampler = FieldSampler::new(config, &grid);
    let mut schedule = EvolutionSchedule::from_config(config).retain(MatrixRetention::Final);
    if !density_times.is_empty() {
        schedule = schedule.with_density_times(density_times);
    }
    let evolution = evolve_all(&basis, &sampler, &schedule)?;
    let final_matrix = evolution
        .final_matrix()
        .cloned()
        .ok_or_else(|| CliError::Numerical("no final transition matrix".into()))?;
    Ok(EvolveOutcome {
        config: config.clone(),
        spectrum: momentum_spectrum(&final_matrix),
        timeseries: TimeSeriesResult::from_samples(&evolution.samples),
        densities: evolution.densities,
        diagnostics: evolution.diagnostics,
        final_matrix,
        elapsed_s: clock.elapsed().as_secs_f64(),
    })
}

pub fn spectrum_csv(s: &SpectrumResult) -> Csv {
    let mut csv = Csv::new(&["N_p", "N"]);
    for (k, n) in s.modes.iter().zip(&s.occupation) {
        csv.row(&[k.to_string(), number(*n)]);
    }
    csv
}

pub fn timeseries_csv(ts: &TimeSeriesResult) -> Csv {
    let mut csv = Csv::new(&["t", "N"]);
    for (t, n) in ts.times.iter().zip(&ts.numbers) {
        csv.row(&[number(*t), number(*n)]);
    }
    csv
}

pub fn density_csv(d: &DensityResult) -> Csv {
    let mut csv = Csv::new(&["z", "rho"]);
    for (z, r) in d.positions.iter().zip(&d.rho) {
        csv.row(&[number(*z), number(*r)]);
    }
    csv
}

/// Options of [`run_evolve`] beyond the configuration.
#[derive(Debug, Clone, Default)]
pub struct EvolveOptions {
    pub out: PathBuf,
    /// Density snapshot times in atomic units; empty means `T` only.
    pub density_times: Vec<f64>,
    /// Also write the final `U_pn` as a binary checkpoint.
    pub checkpoint: bool,
}

/// Writes `spectrum.csv`, `timeseries.csv` and `density.csv` (the latest
/// snapshot). With several snapshots each one is also written as
/// `density_step<step>.csv`.
pub fn write_evolve(outcome: &EvolveOutcome, dir: &Path, manifest: &mut RunManifest) -> Result<(), CliError> {
    create_dir(dir)?;
    manifest.write_output(dir, SPECTRUM_FILE, spectrum_csv(&outcome.spectrum).as_bytes())?;
    manifest.write_output(dir, TIMESERIES_FILE, timeseries_csv(&outcome.timeseries).as_bytes())?;
    if let Some(last) = outcome.densities.last() {
        manifest.write_output(dir, DENSITY_FILE, density_csv(last).as_bytes())?;
    }
    if outcome.densities.len() > 1 {
        let dt = outcome.config.dt();
        for d in &outcome.densities {
            let step = (d.time / dt).round() as usize;
            let name = format!("density_step{step:06}.csv");
            manifest.write_output(dir, &name, density_csv(d).as_bytes())?;
        }
    }
    let diag = &outcome.diagnostics;
    let (pos, neg) = outcome.spectrum.side_totals();
    for (k, v) in [
        ("N_final", outcome.final_number()),
        ("N_positive_modes", pos),
        ("N_negative_modes", neg),
        ("max_step_drift", diag.max_step_drift),
        ("max_norm_drift", diag.max_norm_drift),
        ("max_completeness_error", diag.max_completeness_error),
        ("elapsed_s", outcome.elapsed_s),
    ] {
        manifest.metrics.insert(k.to_string(), v);
    }
    Ok(())
}

pub fn run_evolve(config: &SimulationConfig, opts: &EvolveOptions) -> Result<EvolveOutcome, CliError> {
    let started = unix_now();
    let warnings = config.validate()?;
    let outcome = compute_evolve(config, &opts.density_times)?;
    let mut manifest = RunManifest::new("evolve", config, started);
    manifest.warnings = warnings;
    write_evolve(&outcome, &opts.out, &mut manifest)?;
    if opts.checkpoint {
        let mut bytes = Vec::new();
        outcome.final_matrix.write_checkpoint(&mut bytes)?;
        manifest.write_output(&opts.out, CHECKPOINT_FILE, &bytes)?;
    }
    manifest.finish(&opts.out)?;
    Ok(outcome)
}

// ---------------------------------------------------------------- sweep

/// A set of left-edge widths run against one base configuration.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub base: SimulationConfig,
    /// `W2` values in units of `λ_e = 1/c`.
    pub w2_over_lambda_e: Vec<f64>,
    pub out: PathBuf,
    pub density_times: Vec<f64>,
}

impl SweepPlan {
    pub const DEFAULT_W2: [f64; 7] = [0.075, 0.15, 0.3, 0.6, 0.9, 1.2, 1.5];

    pub fn new(base: SimulationConfig, w2_over_lambda_e: Vec<f64>, out: PathBuf) -> Result<Self, CliError> {
        if w2_over_lambda_e.is_empty() {
            return Err(CliError::Config("sweep: no W2 values".into()));
        }
        for (i, w) in w2_over_lambda_e.iter().enumerate() {
            if !(w.is_finite() && *w > 0.0) {
                return Err(CliError::Config(format!("sweep: W2 = {w} must be > 0")));
            }
            if w2_over_lambda_e[..i].contains(w) {
                return Err(CliError::Config(format!("sweep: W2 = {w} listed twice")));
            }
        }
        Ok(Self {
            base,
            w2_over_lambda_e,
            out,
            density_times: Vec::new(),
        })
    }

    pub fn run_dir(&self, w2_over_lambda_e: f64) -> PathBuf {
        self.out.join(format!("W2_{w2_over_lambda_e}le"))
    }

    pub fn config_for(&self, w2_over_lambda_e: f64) -> SimulationConfig {
        SimulationConfig {
            w2: w2_over_lambda_e / self.base.c,
            ..self.base.clone()
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub w2_over_lambda_e: f64,
    /// Final yield, or the error that stopped the run.
    pub result: Result<f64, String>,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub elapsed_s: f64,
}

impl SweepOutcome {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.result.is_err()).count()
    }

    pub fn summary(&self) -> String {
        let yields: Vec<String> = self
            .rows
            .iter()
            .map(|r| match &r.result {
                Ok(n) => format!("{}:{:.6e}", r.w2_over_lambda_e, n),
                Err(_) => format!("{}:failed", r.w2_over_lambda_e),
            })
            .collect();
        format!(
            "sweep: {} runs, {} failed, N_final by W2/lambda_e [{}] ({:.1} s)",
            self.rows.len(),
            self.failures(),
            yields.join(", "),
            self.elapsed_s
        )
    }
}

pub fn summary_csv(rows: &[SweepRow]) -> Csv {
    let mut csv = Csv::new(&["W2_over_lambda_e", "N_final", "status"]);
    for r in rows {
        match &r.result {
            Ok(n) => csv.row(&[number(r.w2_over_lambda_e), number(*n), "ok".to_string()]),
            Err(e) => csv.row(&[
                number(r.w2_over_lambda_e),
                String::new(),
                text_field(&format!("failed: {e}")),
            ]),
        }
    }
    csv
}

/// Runs every plan entry in its own directory. Completed runs are kept when
/// others fail; the failures are listed in `summary.csv` and reported as
/// [`CliError::PartialSweep`] after the summary is written.
pub fn run_sweep(plan: &SweepPlan) -> Result<SweepOutcome, CliError> {
    let started = unix_now();
    let clock = Instant::now();
    let warnings = plan.base.validate()?;
    create_dir(&plan.out)?;
    let mut rows = Vec::with_capacity(plan.w2_over_lambda_e.len());
    for &w in &plan.w2_over_lambda_e {
        let config = plan.config_for(w);
        let opts = EvolveOptions {
            out: plan.run_dir(w),
            density_times: plan.density_times.clone(),
            checkpoint: false,
        };
        let result = run_evolve(&config, &opts)
            .map(|o| o.final_number())
            .map_err(|e| e.to_string());
        rows.push(SweepRow {
            w2_over_lambda_e: w,
            result,
        });
    }
    let mut manifest = RunManifest::new("sweep", &plan.base, started);
    manifest.warnings = warnings;
    manifest.write_output(&plan.out, SUMMARY_FILE, summary_csv(&rows).as_bytes())?;
    let outcome = SweepOutcome {
        rows,
        elapsed_s: clock.elapsed().as_secs_f64(),
    };
    manifest.metrics.insert("runs".into(), outcome.rows.len() as f64);
    manifest.metrics.insert("failed".into(), outcome.failures() as f64);
    manifest.finish(&plan.out)?;
    Ok(outcome)
}

// ---------------------------------------------------------------- peaks

/// Matching tolerance in units of `c²`.
pub const DEFAULT_MATCH_TOLERANCE_C2: f64 = 0.06;

pub fn read_spectrum(path: &Path) -> Result<SpectrumResult, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let bad = |line: usize, what: &str| CliError::Config(format!("{}:{line}: {what}", path.display()));
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("N_p,N") {
        return Err(bad(1, "expected header `N_p,N`"));
    }
    let mut modes = Vec::new();
    let mut occupation = Vec::new();
    for (i, line) in lines.enumerate() {
        let (k, n) = line.split_once(',').ok_or_else(|| bad(i + 2, "expected two fields"))?;
        modes.push(k.trim().parse::<i64>().map_err(|_| bad(i + 2, "bad N_p"))?);
        occupation.push(n.trim().parse::<f64>().map_err(|_| bad(i + 2, "bad N"))?);
    }
    if modes.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(bad(0, "modes must be consecutive and ascending"));
    }
    Ok(SpectrumResult {
        time: f64::NAN,
        modes,
        occupation,
    })
}

#[derive(Debug, Clone)]
pub struct PeaksOutcome {
    pub bound: BoundStateSet,
    pub report: PeakMatchReport,
    pub detected: usize,
}

impl PeaksOutcome {
    pub fn summary(&self) -> String {
        let c2 = self.bound.c * self.bound.c;
        let worst = self.report.rows.iter().map(|r| r.gap.abs()).fold(0.0, f64::max) / c2;
        let pairs: Vec<String> = self
            .report
            .rows
            .iter()
            .map(|r| format!("({}, {})", r.level, r.detected_mode))
            .collect();
        format!(
            "peaks: {} detected, {} matched [{}], {} predicted unmatched, max |gap| = {:.4} c^2",
            self.detected,
            self.report.rows.len(),
            pairs.join(" "),
            self.report.unmatched_predicted.len(),
            worst
        )
    }
}

/// Bound states of `config`, peaks `E_i + nω` predicted for `n_photons`,
/// spectrum maxima detected in `range`, and the greedy matching.
pub fn analyze_peaks(
    config: &SimulationConfig,
    spectrum: &SpectrumResult,
    n_photons: u32,
    range: (i64, i64),
    tolerance_c2: f64,
) -> Result<PeaksOutcome, CliError> {
    if n_photons < 1 {
        return Err(CliError::Config("n-photons must be >= 1".into()));
    }
    if range.0 > range.1 {
        return Err(CliError::Config(format!("range {}:{} is empty", range.0, range.1)));
    }
    if spectrum.modes.len() != config.nz {
        return Err(CliError::Config(format!(
            "spectrum has {} modes but Nz = {}",
            spectrum.modes.len(),
            config.nz
        )));
    }
    let bound = solve_bound_states(config.c, config.v1, config.well_width)?;
    let predicted = predict_peaks(&bound, config.omega, n_photons, config.box_length);
    let detected = detect_peaks(spectrum, range, DetectOptions::default());
    let report = match_peaks(
        &predicted.peaks,
        &detected,
        tolerance_c2 * config.c2(),
        config.c,
        config.box_length,
    );
    Ok(PeaksOutcome {
        bound,
        report,
        detected: detected.len(),
    })
}

/// Matched rows first, then predictions left unmatched with empty detected
/// fields. Energies are in units of `c²`.
pub fn matches_csv(outcome: &PeaksOutcome) -> Csv {
    let c2 = outcome.bound.c * outcome.bound.c;
    let mut csv = Csv::new(&[
        "i",
        "n",
        "E_i_over_c2",
        "E_pred_over_c2",
        "N_p_pred",
        "N_p_detected",
        "E_detected_over_c2",
        "gap_over_c2",
    ]);
    for r in &outcome.report.rows {
        csv.row(&[
            r.level.to_string(),
            r.photons.to_string(),
            number(r.level_energy / c2),
            number(r.predicted_energy / c2),
            number(r.predicted_mode),
            r.detected_mode.to_string(),
            number(r.detected_energy / c2),
            number(r.gap / c2),
        ]);
    }
    for p in &outcome.report.unmatched_predicted {
        csv.row(&[
            p.level.to_string(),
            p.photons.to_string(),
            number(p.level_energy / c2),
            number(p.energy / c2),
            number(p.mode),
            String::new(),
            String::new(),
            String::new(),
        ]);
    }
    csv
}

#[derive(Debug, Clone)]
pub struct PeaksOptions {
    pub out: PathBuf,
    /// Spectrum to analyse; when absent, `out/spectrum.csv` is used if it
    /// exists, otherwise a fresh evolution is run into `out` first.
    pub spectrum: Option<PathBuf>,
    pub n_photons: u32,
    pub range: (i64, i64),
    pub tolerance_c2: f64,
}

pub fn run_peaks(config: &SimulationConfig, opts: &PeaksOptions) -> Result<PeaksOutcome, CliError> {
    let started = unix_now();
    let default_path = opts.out.join(SPECTRUM_FILE);
    let path = match &opts.spectrum {
        Some(p) => p.clone(),
        None => {
            if !default_path.exists() {
                run_evolve(
                    config,
                    &EvolveOptions {
                        out: opts.out.clone(),
                        ..EvolveOptions::default()
                    },
                )?;
            }
            default_path
        }
    };
    let spectrum = read_spectrum(&path)?;
    let outcome = analyze_peaks(config, &spectrum, opts.n_photons, opts.range, opts.tolerance_c2)?;
    create_dir(&opts.out)?;
    let mut manifest = RunManifest::new("peaks", config, started);
    manifest.write_output(&opts.out, MATCHES_FILE, matches_csv(&outcome).as_bytes())?;
    manifest.metrics.insert("n_photons".into(), opts.n_photons as f64);
    manifest.metrics.insert("detected".into(), outcome.detected as f64);
    manifest.metrics.insert("matched".into(), outcome.report.rows.len() as f64);
    // the peaks manifest sits beside the evolve one rather than replacing it
    manifest.finish_as(&opts.out, PEAKS_MANIFEST_FILE)?;
    Ok(outcome)
}
