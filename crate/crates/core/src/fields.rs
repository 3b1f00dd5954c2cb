//! The external scalar potential
//! `V(z, t) = V1 S(z) f(t) + V2 sin(ωt) S(z) θ(t; t0, t0 + t1)`.

use std::f64::consts::FRAC_PI_2;

use crate::config::{SimulationConfig, WellShape};
use crate::error::{Error, Result};
use crate::grid::Grid;

/// Two-edged well: `[tanh((z − D/2)/W1) − tanh((z + D/2)/W2)] / 2`.
///
/// `W1` sets the right edge (at `+D/2`), `W2` the left edge (at `−D/2`).
/// Values lie in `[−1, 0]`.
pub fn shape_two_sided(z: f64, d: f64, w1: f64, w2: f64) -> f64 {
    0.5 * (((z - 0.5 * d) / w1).tanh() - ((z + 0.5 * d) / w2).tanh())
}

/// Single edge at the origin: `(1 + tanh(z/W)) / 2`, in `[0, 1]`.
pub fn shape_one_sided(z: f64, w: f64) -> f64 {
    0.5 * (1.0 + (z / w).tanh())
}

/// Half-open step: 1 on `[a, b)`, else 0.
pub fn theta(t: f64, a: f64, b: f64) -> Result<f64> {
    if a > b {
        return Err(Error::Domain(format!("theta: a = {a} > b = {b}")));
    }
    Ok(if a <= t && t < b { 1.0 } else { 0.0 })
}

/// Switching envelope: sine ramp on `[0, t0)`, plateau on `[t0, t0 + t1)`,
/// cosine ramp-down on `[t0 + t1, 2t0 + t1]`.
pub fn envelope(t: f64, t0: f64, t1: f64) -> Result<f64> {
    let total = 2.0 * t0 + t1;
    if !(0.0..=total).contains(&t) {
        return Err(Error::Domain(format!("envelope: t = {t} outside [0, {total}]")));
    }
    Ok(envelope_unchecked(t, t0, t1))
}

fn envelope_unchecked(t: f64, t0: f64, t1: f64) -> f64 {
    if t < t0 {
        (FRAC_PI_2 * t / t0).sin()
    } else if t < t0 + t1 {
        1.0
    } else {
        (FRAC_PI_2 * (t - t0 - t1) / t0).cos()
    }
}

/// Well shape sampled once on the grid, plus the temporal parameters.
#[derive(Debug, Clone)]
pub struct FieldSampler {
    shape: Vec<f64>,
    well_shape: WellShape,
    v1: f64,
    v2: f64,
    omega: f64,
    t0: f64,
    t1: f64,
}

impl FieldSampler {
    pub fn new(config: &SimulationConfig, grid: &Grid) -> Self {
        let shape = grid
            .positions()
            .into_iter()
            .map(|z| match config.well_shape {
                WellShape::TwoSided => shape_two_sided(z, config.well_width, config.w1, config.w2),
                // the single edge takes the right-edge width
                WellShape::OneSided => shape_one_sided(z, config.w1),
            })
            .collect();
        Self {
            shape,
            well_shape: config.well_shape,
            v1: config.v1,
            v2: config.v2,
            omega: config.omega,
            t0: config.t0,
            t1: config.t1,
        }
    }

    /// Time-independent well `V1 S(z)` (envelope held at 1, no oscillation).
    pub fn static_well(config: &SimulationConfig, grid: &Grid) -> StaticField {
        let sampler = Self::new(config, grid);
        StaticField {
            potential: sampler.shape.iter().map(|s| config.v1 * s).collect(),
        }
    }

    pub fn shape(&self) -> &[f64] {
        &self.shape
    }

    pub fn well_shape(&self) -> WellShape {
        self.well_shape
    }

    pub fn total_time(&self) -> f64 {
        2.0 * self.t0 + self.t1
    }

    /// Scalar `a(t)` with `V(z_j, t) = a(t) S(z_j)`. Times outside `[0, T]`
    /// are clamped to the nearest end.
    pub fn amplitude(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.total_time());
        let f = envelope_unchecked(t, self.t0, self.t1);
        let gate = if self.t0 <= t && t < self.t0 + self.t1 { 1.0 } else { 0.0 };
        self.v1 * f + self.v2 * (self.omega * t).sin() * gate
    }

    pub fn potential(&self, j: usize, t: f64) -> Result<f64> {
        if !(0.0..=self.total_time()).contains(&t) {
            return Err(Error::Domain(format!(
                "potential: t = {t} outside [0, {}]",
                self.total_time()
            )));
        }
        Ok(self.amplitude(t) * self.shape[j])
    }

    /// `V(z_j, t)` for every grid point.
    pub fn potential_at(&self, t: f64) -> Vec<f64> {
        let a = self.amplitude(t);
        self.shape.iter().map(|s| a * s).collect()
    }
}

/// A potential that does not change in time.
#[derive(Debug, Clone)]
pub struct StaticField {
    pub potential: Vec<f64>,
}

/// Anything that can provide `V(z_j, t)` on the full grid.
pub trait Potential: Sync {
    fn fill(&self, t: f64, out: &mut [f64]);
}

impl Potential for FieldSampler {
    fn fill(&self, t: f64, out: &mut [f64]) {
        let a = self.amplitude(t);
        for (o, s) in out.iter_mut().zip(&self.shape) {
            *o = a * s;
        }
    }
}

impl Potential for StaticField {
    fn fill(&self, _t: f64, out: &mut [f64]) {
        out.copy_from_slice(&self.potential);
    }
}

/// No field at all.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroField;

impl Potential for ZeroField {
    fn fill(&self, _t: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
    }
}
