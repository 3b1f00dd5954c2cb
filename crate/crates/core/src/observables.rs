//! Created-electron observables derived from `U_pn` and the evolved states.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::free_basis::{Branch, FreeBasis};
use crate::propagator::{SampleSummary, TransitionMatrix};
use crate::spinor::{Representation, SpectralTransform, SpinorField};

/// Created-electron occupation per signed mode, `N(N_p) = Σ_n |U_pn|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub time: f64,
    pub modes: Vec<i64>,
    pub occupation: Vec<f64>,
}

impl SpectrumResult {
    pub fn total(&self) -> f64 {
        self.occupation.iter().sum()
    }

    pub fn at(&self, mode: i64) -> Option<f64> {
        let first = *self.modes.first()?;
        self.occupation.get(usize::try_from(mode - first).ok()?).copied()
    }

    /// `(Σ_{N_p>0} N, Σ_{N_p<0} N)`.
    pub fn side_totals(&self) -> (f64, f64) {
        let mut pos = 0.0;
        let mut neg = 0.0;
        for (&k, &n) in self.modes.iter().zip(&self.occupation) {
            if k > 0 {
                pos += n;
            } else if k < 0 {
                neg += n;
            }
        }
        (pos, neg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesResult {
    pub times: Vec<f64>,
    pub numbers: Vec<f64>,
}

impl TimeSeriesResult {
    pub fn from_samples(samples: &[SampleSummary]) -> Self {
        Self {
            times: samples.iter().map(|s| s.time).collect(),
            numbers: samples.iter().map(|s| s.total_number).collect(),
        }
    }

    pub fn last(&self) -> Option<f64> {
        self.numbers.last().copied()
    }
}

/// Created-electron number density `ρ_e(z_j)` at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityResult {
    pub time: f64,
    pub positions: Vec<f64>,
    pub rho: Vec<f64>,
}

impl DensityResult {
    /// `Σ_j ρ_j Δz`.
    pub fn integral(&self) -> f64 {
        let dz = match self.positions.as_slice() {
            [a, b, ..] => b - a,
            _ => return 0.0,
        };
        self.rho.iter().sum::<f64>() * dz
    }
}

pub fn momentum_spectrum(u: &TransitionMatrix) -> SpectrumResult {
    let nz = u.nz();
    let half = (nz / 2) as i64;
    let modes = (-half..half).collect();
    let occupation = (0..nz)
        .map(|p| u.row(p).iter().map(|a| a.norm_sqr()).sum())
        .collect();
    SpectrumResult {
        time: u.time,
        modes,
        occupation,
    }
}

/// `Σ_n Σ_p |U_pn|²`: each column summed over ascending `p`, then columns
/// over ascending `n`. This is the order the propagator uses for its
/// per-sample totals, so the two agree bit for bit.
pub fn total_number(u: &TransitionMatrix) -> f64 {
    u.column_norms().iter().sum()
}

/// `|φ(z_j)|²` where `φ` is the positive-energy part of one evolved state
/// (`φ̃_k = u_k u_k† ψ̃_k`) brought back to position space.
pub fn density_contribution(
    state: &SpinorField,
    basis: &FreeBasis,
    transform: &SpectralTransform,
) -> Result<Vec<f64>> {
    let amplitudes = basis.project(state, Branch::Positive)?;
    let mut projected = SpinorField::zeros(basis.grid(), Representation::Momentum);
    for (i, a) in amplitudes.iter().enumerate() {
        let u = basis.spinor_at(i, Branch::Positive);
        projected.set(i, [*a * u[0], *a * u[1]]);
    }
    let phi = transform.to_position(&projected)?;
    Ok(phi
        .upper()
        .iter()
        .zip(phi.lower())
        .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
        .collect())
}

/// `ρ_e(z) = Σ_n |φ_n(z)|²` from the evolved momentum-space states, summed
/// in the order given.
pub fn spatial_density(states: &[SpinorField], basis: &FreeBasis, time: f64) -> Result<DensityResult> {
    let grid = basis.grid();
    let transform = SpectralTransform::new(grid.len());
    let mut rho = vec![0.0; grid.len()];
    for state in states {
        if state.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "state of {} points on a {}-point basis",
                state.len(),
                grid.len()
            )));
        }
        for (r, x) in rho.iter_mut().zip(density_contribution(state, basis, &transform)?) {
            *r += x;
        }
    }
    Ok(DensityResult {
        time,
        positions: grid.positions(),
        rho,
    })
}

/// Direct double sum `ρ_e(z_j) = Σ_n |Σ_p U_pn W_p(z_j)|²` with the
/// plane-wave spinors `W_p(z_j) = u_p e^{2πi j N_p / Nz} / √L`.
/// Cost is `O(Nz³)`; meant as a cross-check on small grids.
pub fn density_from_transition_matrix(u: &TransitionMatrix, basis: &FreeBasis) -> Result<DensityResult> {
    let grid = basis.grid();
    let nz = grid.len();
    if u.nz() != nz {
        return Err(Error::GridMismatch(format!(
            "matrix of {} modes on a {nz}-point basis",
            u.nz()
        )));
    }
    let norm = 1.0 / grid.length().sqrt();
    let mut rho = vec![0.0; nz];
    for (j, r) in rho.iter_mut().enumerate() {
        let waves: Vec<Complex64> = grid
            .modes()
            .map(|k| {
                let angle = 2.0 * std::f64::consts::PI * (j as f64) * (k as f64) / nz as f64;
                Complex64::from_polar(norm, angle)
            })
            .collect();
        for n in 0..nz {
            let mut upper = Complex64::new(0.0, 0.0);
            let mut lower = Complex64::new(0.0, 0.0);
            for (p, w) in waves.iter().enumerate() {
                let s = basis.spinor_at(p, Branch::Positive);
                let a = u.entry(p, n) * w;
                upper += a * s[0];
                lower += a * s[1];
            }
            *r += upper.norm_sqr() + lower.norm_sqr();
        }
    }
    Ok(DensityResult {
        time: u.time,
        positions: grid.positions(),
        rho,
    })
}
