//! Strang split-operator propagation and transition-amplitude assembly.
//!
//! One step is `e^{−iV dt/2} · F⁻¹ e^{−iH₀ dt} F · e^{−iV dt/2}` with the
//! potential sampled at the step midpoint. Each negative-energy plane wave is
//! propagated independently; at every sample step the evolved state is
//! projected on the positive-energy spinors, giving one column of `U_pn`.

use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::SimulationConfig;
use crate::error::{Error, Result};
use crate::fields::Potential;
use crate::free_basis::{mode_coefficients, Branch, FreeBasis};
use crate::grid::Grid;
use crate::observables::{self, DensityResult};
use crate::spinor::{Representation, SpectralTransform, SpinorField};

pub type Mat2 = [[Complex64; 2]; 2];

/// Norm drift beyond which propagation is aborted.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `exp(−i H₀ dt) = cos(E dt) I − i sin(E dt) H₀/E` for one mode.
pub fn kinetic_phase(basis: &FreeBasis, mode: i64, dt: f64) -> Mat2 {
    kinetic_matrix(basis, mode, dt, 1.0)
}

fn kinetic_matrix(basis: &FreeBasis, mode: i64, dt: f64, scale: f64) -> Mat2 {
    let (a, b) = mode_coefficients(basis.grid(), mode, basis.c());
    let e = basis.energy(mode);
    let (s, co) = (e * dt).sin_cos();
    let diag = s * b / e;
    let off = s * a / e;
    [
        [
            Complex64::new(co, -diag) * scale,
            Complex64::new(0.0, -off) * scale,
        ],
        [
            Complex64::new(0.0, -off) * scale,
            Complex64::new(co, diag) * scale,
        ],
    ]
}

/// Reusable split-step kernel acting on raw buffers `[upper | lower]` in
/// unitary position scale.
struct Kernel {
    n: usize,
    transform: SpectralTransform,
    /// per FFT slot, with the `1/Nz` of the unnormalised round trip folded in
    kinetic: Vec<Mat2>,
}

impl Kernel {
    fn new(basis: &FreeBasis, dt: f64) -> Self {
        let grid = basis.grid();
        let n = grid.len();
        let scale = 1.0 / n as f64;
        let kinetic = (0..n)
            .map(|slot| kinetic_matrix(basis, grid.mode_of_slot(slot), dt, scale))
            .collect();
        Self {
            n,
            transform: SpectralTransform::new(n),
            kinetic,
        }
    }

    fn scratch(&self) -> Vec<Complex64> {
        vec![ZERO; self.transform.scratch_len()]
    }

    fn apply(&self, buf: &mut [Complex64], half_phase: &[Complex64], scratch: &mut [Complex64]) {
        let n = self.n;
        multiply_phase(buf, half_phase);
        self.transform.forward_raw(buf, scratch);
        let (upper, lower) = buf.split_at_mut(n);
        for ((a, b), k) in upper.iter_mut().zip(lower.iter_mut()).zip(&self.kinetic) {
            let (x, y) = (*a, *b);
            *a = k[0][0] * x + k[0][1] * y;
            *b = k[1][0] * x + k[1][1] * y;
        }
        self.transform.inverse_raw(buf, scratch);
        multiply_phase(buf, half_phase);
    }
}

fn multiply_phase(buf: &mut [Complex64], phase: &[Complex64]) {
    let (upper, lower) = buf.split_at_mut(phase.len());
    for ((a, b), ph) in upper.iter_mut().zip(lower.iter_mut()).zip(phase) {
        *a *= ph;
        *b *= ph;
    }
}

fn fill_half_phase(potential: &dyn Potential, t_mid: f64, dt: f64, v: &mut [f64], out: &mut [Complex64]) {
    potential.fill(t_mid, v);
    for (o, &vj) in out.iter_mut().zip(v.iter()) {
        *o = Complex64::from_polar(1.0, -0.5 * vj * dt);
    }
}

fn raw_norm(buf: &[Complex64]) -> f64 {
    buf.iter().map(|a| a.norm_sqr()).sum()
}

/// One Strang step of a position-space field from `t` to `t + dt`.
pub fn split_step(
    state: &SpinorField,
    t: f64,
    dt: f64,
    potential: &dyn Potential,
    basis: &FreeBasis,
) -> Result<SpinorField> {
    let mut stepper = Stepper::new(basis, potential, dt);
    let mut out = state.clone();
    stepper.step(&mut out, t)?;
    Ok(out)
}

/// Repeated split steps with a fixed `dt`.
pub struct Stepper<'a> {
    kernel: Kernel,
    potential: &'a dyn Potential,
    dt: f64,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
    v: Vec<f64>,
    phase: Vec<Complex64>,
}

impl<'a> Stepper<'a> {
    pub fn new(basis: &FreeBasis, potential: &'a dyn Potential, dt: f64) -> Self {
        let kernel = Kernel::new(basis, dt);
        let n = kernel.n;
        let scratch = kernel.scratch();
        Self {
            kernel,
            potential,
            dt,
            buf: vec![ZERO; 2 * n],
            scratch,
            v: vec![0.0; n],
            phase: vec![ZERO; n],
        }
    }

    pub fn step(&mut self, state: &mut SpinorField, t: f64) -> Result<()> {
        let n = self.kernel.n;
        if state.representation() != Representation::Position {
            return Err(Error::Representation {
                expected: Representation::Position,
                found: state.representation(),
            });
        }
        if state.len() != n {
            return Err(Error::GridMismatch(format!(
                "stepper for {n} points, field has {}",
                state.len()
            )));
        }
        fill_half_phase(self.potential, t + 0.5 * self.dt, self.dt, &mut self.v, &mut self.phase);
        self.buf[..n].copy_from_slice(state.upper());
        self.buf[n..].copy_from_slice(state.lower());
        self.kernel.apply(&mut self.buf, &self.phase, &mut self.scratch);
        state.upper_mut().copy_from_slice(&self.buf[..n]);
        state.lower_mut().copy_from_slice(&self.buf[n..]);
        Ok(())
    }
}

/// Time step and sampling plan of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionSchedule {
    pub nt: usize,
    pub dt: f64,
    /// Strictly increasing step indices, starting at 0 and ending at `nt`.
    pub samples: Vec<usize>,
    /// Steps at which spatial densities are taken (subset of `samples`).
    pub density_steps: Vec<usize>,
    pub retain: MatrixRetention,
}

/// Which sampled transition matrices are kept in memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixRetention {
    All,
    Final,
}

impl EvolutionSchedule {
    pub fn new(nt: usize, dt: f64, stride: usize) -> Self {
        let stride = stride.max(1);
        let mut samples: Vec<usize> = (0..=nt).step_by(stride).collect();
        if samples.last() != Some(&nt) {
            samples.push(nt);
        }
        Self {
            nt,
            dt,
            samples,
            density_steps: vec![nt],
            retain: MatrixRetention::Final,
        }
    }

    pub fn from_config(config: &SimulationConfig) -> Self {
        Self::new(config.nt, config.dt(), config.sample_stride)
    }

    pub fn retain(mut self, retain: MatrixRetention) -> Self {
        self.retain = retain;
        self
    }

    /// Density snapshots at the steps nearest to the given times; each such
    /// step is added to the sample list.
    pub fn with_density_times(mut self, times: &[f64]) -> Self {
        let mut steps: Vec<usize> = times
            .iter()
            .map(|&t| ((t / self.dt).round().max(0.0) as usize).min(self.nt))
            .collect();
        steps.sort_unstable();
        steps.dedup();
        self.density_steps = steps;
        self.samples.extend(self.density_steps.iter().copied());
        self.samples.sort_unstable();
        self.samples.dedup();
        self
    }

    pub fn time_of(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }

    fn keeps_matrix(&self, step: usize) -> bool {
        match self.retain {
            MatrixRetention::All => true,
            MatrixRetention::Final => step == self.nt,
        }
    }
}

/// `U[p][n]` for every positive mode `p` and negative mode `n`, both in
/// ascending signed-mode order, at one sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    pub step: usize,
    pub time: f64,
    nz: usize,
    data: Vec<Complex64>,
}

impl TransitionMatrix {
    pub fn zeros(nz: usize, step: usize, time: f64) -> Self {
        Self {
            step,
            time,
            nz,
            data: vec![ZERO; nz * nz],
        }
    }

    pub fn from_columns(nz: usize, step: usize, time: f64, columns: &[Vec<Complex64>]) -> Self {
        let mut m = Self::zeros(nz, step, time);
        for (n, col) in columns.iter().enumerate() {
            for (p, &a) in col.iter().enumerate() {
                m.data[p * nz + n] = a;
            }
        }
        m
    }

    pub fn nz(&self) -> usize {
        self.nz
    }

    /// Entry by ascending-order ordinals.
    pub fn entry(&self, p: usize, n: usize) -> Complex64 {
        self.data[p * self.nz + n]
    }

    /// Entry by signed modes.
    pub fn get(&self, p_mode: i64, n_mode: i64) -> Complex64 {
        let half = (self.nz / 2) as i64;
        self.entry((p_mode + half) as usize, (n_mode + half) as usize)
    }

    pub fn row(&self, p: usize) -> &[Complex64] {
        &self.data[p * self.nz..(p + 1) * self.nz]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// `Σ_p |U_pn|²` for every column, in ascending `p`.
    pub fn column_norms(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.nz];
        for p in 0..self.nz {
            for (acc, a) in out.iter_mut().zip(self.row(p)) {
                *acc += a.norm_sqr();
            }
        }
        out
    }

    pub fn max_modulus(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn write_checkpoint<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(CHECKPOINT_MAGIC)?;
        w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
        w.write_all(&(self.nz as u64).to_le_bytes())?;
        w.write_all(&(self.step as u64).to_le_bytes())?;
        w.write_all(&self.time.to_le_bytes())?;
        let mut bytes = Vec::with_capacity(16 * self.data.len());
        for a in &self.data {
            bytes.extend_from_slice(&a.re.to_le_bytes());
            bytes.extend_from_slice(&a.im.to_le_bytes());
        }
        w.write_all(&bytes)?;
        Ok(())
    }

    pub fn read_checkpoint<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; 32];
        r.read_exact(&mut header)?;
        if &header[..4] != CHECKPOINT_MAGIC {
            return Err(Error::Checkpoint("bad magic".into()));
        }
        let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
        if version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {version}")));
        }
        let nz = u64::from_le_bytes(header[8..16].try_into().unwrap()) as usize;
        let step = u64::from_le_bytes(header[16..24].try_into().unwrap()) as usize;
        let time = f64::from_le_bytes(header[24..32].try_into().unwrap());
        if nz == 0 || !nz.is_power_of_two() || nz > 1 << 16 {
            return Err(Error::Checkpoint(format!("implausible Nz {nz}")));
        }
        let mut bytes = vec![0u8; 16 * nz * nz];
        r.read_exact(&mut bytes)?;
        let data = bytes
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        Ok(Self { step, time, nz, data })
    }
}

const CHECKPOINT_MAGIC: &[u8; 4] = b"UPNM";
const CHECKPOINT_VERSION: u32 = 1;

/// Per-sample scalars that do not need the full matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSummary {
    pub step: usize,
    pub time: f64,
    /// `Σ_n Σ_p |U_pn|²`, columns summed in ascending `n`.
    pub total_number: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Largest single-step change of a state's squared norm.
    pub max_step_drift: f64,
    /// Largest deviation of a state's squared norm from 1 over the run.
    pub max_norm_drift: f64,
    /// Largest `|Σ_p |U_pn|² + Σ_n' |U_n'n|² − 1|` over all samples and columns.
    pub max_completeness_error: f64,
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub samples: Vec<SampleSummary>,
    pub matrices: Vec<TransitionMatrix>,
    pub densities: Vec<DensityResult>,
    pub diagnostics: Diagnostics,
}

impl Evolution {
    pub fn final_matrix(&self) -> Option<&TransitionMatrix> {
        self.matrices.last()
    }
}

struct ColumnResult {
    /// one column per retained sample
    kept: Vec<Vec<Complex64>>,
    /// `Σ_p |U_pn|²` per sample
    positive_norms: Vec<f64>,
    densities: Vec<Vec<f64>>,
    max_step_drift: f64,
    max_norm_drift: f64,
    max_completeness_error: f64,
}

/// Columns propagated together so the per-step phase array is shared.
const BLOCK: usize = 16;

/// Propagates every negative-energy plane wave through the schedule and
/// assembles the sampled transition matrices.
///
/// Columns run in parallel on the current rayon pool; all reductions are
/// done afterwards in ascending mode order, so results do not depend on
/// scheduling.
pub fn evolve_all(
    basis: &FreeBasis,
    potential: &dyn Potential,
    schedule: &EvolutionSchedule,
) -> Result<Evolution> {
    let grid = basis.grid();
    let n = grid.len();
    let kernel = Kernel::new(basis, schedule.dt);
    let ordinals: Vec<usize> = (0..n).collect();

    let blocks: Vec<Result<Vec<ColumnResult>>> = ordinals
        .par_chunks(BLOCK)
        .map(|chunk| evolve_block(chunk, basis, &kernel, potential, schedule))
        .collect();

    let mut columns = Vec::with_capacity(n);
    for block in blocks {
        columns.extend(block?);
    }

    let mut diagnostics = Diagnostics::default();
    for col in &columns {
        diagnostics.max_step_drift = diagnostics.max_step_drift.max(col.max_step_drift);
        diagnostics.max_norm_drift = diagnostics.max_norm_drift.max(col.max_norm_drift);
        diagnostics.max_completeness_error =
            diagnostics.max_completeness_error.max(col.max_completeness_error);
    }

    let samples = schedule
        .samples
        .iter()
        .enumerate()
        .map(|(s, &step)| SampleSummary {
            step,
            time: schedule.time_of(step),
            total_number: columns.iter().map(|c| c.positive_norms[s]).sum(),
        })
        .collect();

    let kept_steps: Vec<usize> = schedule
        .samples
        .iter()
        .copied()
        .filter(|&s| schedule.keeps_matrix(s))
        .collect();
    let mut matrices = Vec::with_capacity(kept_steps.len());
    for (k, &step) in kept_steps.iter().enumerate() {
        let mut m = TransitionMatrix::zeros(n, step, schedule.time_of(step));
        for (col_idx, col) in columns.iter_mut().enumerate() {
            let values = std::mem::take(&mut col.kept[k]);
            for (p, a) in values.into_iter().enumerate() {
                m.data[p * n + col_idx] = a;
            }
        }
        matrices.push(m);
    }

    let densities = schedule
        .density_steps
        .iter()
        .enumerate()
        .map(|(d, &step)| {
            let mut rho = vec![0.0; n];
            for col in &columns {
                for (r, x) in rho.iter_mut().zip(&col.densities[d]) {
                    *r += x;
                }
            }
            DensityResult {
                time: schedule.time_of(step),
                positions: grid.positions(),
                rho,
            }
        })
        .collect();

    Ok(Evolution {
        samples,
        matrices,
        densities,
        diagnostics,
    })
}

fn evolve_block(
    chunk: &[usize],
    basis: &FreeBasis,
    kernel: &Kernel,
    potential: &dyn Potential,
    schedule: &EvolutionSchedule,
) -> Result<Vec<ColumnResult>> {
    let grid = basis.grid();
    let n = grid.len();
    let inv_sqrt_n = 1.0 / (n as f64).sqrt();
    let mut scratch = kernel.scratch();
    let mut v = vec![0.0; n];
    let mut phase = vec![ZERO; n];
    let mut tmp = vec![ZERO; 2 * n];

    let mut states: Vec<Vec<Complex64>> = Vec::with_capacity(chunk.len());
    let mut results: Vec<ColumnResult> = Vec::with_capacity(chunk.len());
    let mut norms: Vec<f64> = Vec::with_capacity(chunk.len());
    for &ordinal in chunk {
        let spinor = basis.spinor_at(ordinal, Branch::Negative);
        let slot = grid.fft_slot(grid.mode_at(ordinal));
        let mut buf = vec![ZERO; 2 * n];
        buf[slot] = Complex64::new(spinor[0], 0.0);
        buf[n + slot] = Complex64::new(spinor[1], 0.0);
        kernel.transform.inverse_raw(&mut buf, &mut scratch);
        buf.iter_mut().for_each(|a| *a *= inv_sqrt_n);
        norms.push(raw_norm(&buf));
        states.push(buf);
        results.push(ColumnResult {
            kept: Vec::new(),
            positive_norms: Vec::with_capacity(schedule.samples.len()),
            densities: Vec::new(),
            max_step_drift: 0.0,
            max_norm_drift: 0.0,
            max_completeness_error: 0.0,
        });
    }

    let mut next_sample = 0;
    let mut next_density = 0;
    for step in 0..=schedule.nt {
        if step > 0 {
            let t = schedule.time_of(step - 1);
            fill_half_phase(potential, t + 0.5 * schedule.dt, schedule.dt, &mut v, &mut phase);
            for (c, buf) in states.iter_mut().enumerate() {
                kernel.apply(buf, &phase, &mut scratch);
                let norm = raw_norm(buf);
                let res = &mut results[c];
                res.max_step_drift = res.max_step_drift.max((norm - norms[c]).abs());
                let drift = (norm - 1.0).abs();
                res.max_norm_drift = res.max_norm_drift.max(drift);
                norms[c] = norm;
                if drift > NORM_DRIFT_LIMIT || !norm.is_finite() {
                    return Err(Error::NormDrift {
                        mode: grid.mode_at(chunk[c]),
                        step,
                        drift,
                    });
                }
            }
        }
        if schedule.samples.get(next_sample) != Some(&step) {
            continue;
        }
        next_sample += 1;
        let keep = schedule.keeps_matrix(step);
        let density = schedule.density_steps.get(next_density) == Some(&step);
        if density {
            next_density += 1;
        }
        for (c, buf) in states.iter().enumerate() {
            let res = &mut results[c];
            // momentum-space amplitudes in ascending mode order
            let momentum = if step == 0 {
                let mut m = vec![ZERO; 2 * n];
                let s = basis.spinor_at(chunk[c], Branch::Negative);
                m[chunk[c]] = Complex64::new(s[0], 0.0);
                m[n + chunk[c]] = Complex64::new(s[1], 0.0);
                m
            } else {
                tmp.copy_from_slice(buf);
                kernel.transform.forward_raw(&mut tmp, &mut scratch);
                let mut m = vec![ZERO; 2 * n];
                for i in 0..n {
                    let slot = grid.fft_slot(grid.mode_at(i));
                    m[i] = tmp[slot] * inv_sqrt_n;
                    m[n + i] = tmp[n + slot] * inv_sqrt_n;
                }
                m
            };
            let (upper, lower) = momentum.split_at(n);
            let mut column = Vec::with_capacity(n);
            let mut positive = 0.0;
            let mut negative = 0.0;
            for i in 0..n {
                let u = basis.spinor_at(i, Branch::Positive);
                let w = basis.spinor_at(i, Branch::Negative);
                let a = upper[i] * u[0] + lower[i] * u[1];
                let b = upper[i] * w[0] + lower[i] * w[1];
                positive += a.norm_sqr();
                negative += b.norm_sqr();
                column.push(a);
            }
            res.positive_norms.push(positive);
            res.max_completeness_error = res
                .max_completeness_error
                .max((positive + negative - 1.0).abs());
            if density {
                let field = SpinorField::from_components(
                    grid,
                    Representation::Momentum,
                    upper.to_vec(),
                    lower.to_vec(),
                )?;
                res.densities.push(observables::density_contribution(
                    &field,
                    basis,
                    &kernel.transform,
                )?);
            }
            if keep {
                res.kept.push(column);
            }
        }
    }
    Ok(results)
}

/// Convenience: the full pipeline for a configuration and potential, with
/// every sample matrix retained. Intended for small grids.
pub fn evolve_config(config: &SimulationConfig, potential: &dyn Potential) -> Result<Evolution> {
    let grid = Grid::from_config(config)?;
    let basis = FreeBasis::new(&grid, config.c);
    let schedule = EvolutionSchedule::from_config(config).retain(MatrixRetention::All);
    evolve_all(&basis, potential, &schedule)
}
