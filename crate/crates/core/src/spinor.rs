//! Two-component spinor fields and the unitary position/momentum transform.
//!
//! Position amplitudes are wavefunction values, normalised as
//! `Σ_j |ψ_j|² Δz`. Momentum amplitudes are discrete mode coefficients,
//! normalised as `Σ_k |ψ̃_k|²`, stored in ascending signed-mode order. The
//! transform uses the symmetric `1/√Nz` convention, so both norms agree.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Position,
    Momentum,
}

/// A complex two-component amplitude per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    upper: Vec<Complex64>,
    lower: Vec<Complex64>,
    dz: f64,
    repr: Representation,
}

impl SpinorField {
    pub fn zeros(grid: &Grid, repr: Representation) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            upper: vec![zero; grid.len()],
            lower: vec![zero; grid.len()],
            dz: grid.dz(),
            repr,
        }
    }

    pub fn from_components(
        grid: &Grid,
        repr: Representation,
        upper: Vec<Complex64>,
        lower: Vec<Complex64>,
    ) -> Result<Self> {
        if upper.len() != grid.len() || lower.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "components of length {}/{} on a grid of {} points",
                upper.len(),
                lower.len(),
                grid.len()
            )));
        }
        Ok(Self {
            upper,
            lower,
            dz: grid.dz(),
            repr,
        })
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn len(&self) -> usize {
        self.upper.len()
    }

    pub fn is_empty(&self) -> bool {
        self.upper.is_empty()
    }

    pub fn upper(&self) -> &[Complex64] {
        &self.upper
    }

    pub fn lower(&self) -> &[Complex64] {
        &self.lower
    }

    pub fn upper_mut(&mut self) -> &mut [Complex64] {
        &mut self.upper
    }

    pub fn lower_mut(&mut self) -> &mut [Complex64] {
        &mut self.lower
    }

    /// Spinor at index `i` (grid point or ascending-order mode ordinal).
    pub fn at(&self, i: usize) -> [Complex64; 2] {
        [self.upper[i], self.lower[i]]
    }

    pub fn set(&mut self, i: usize, value: [Complex64; 2]) {
        self.upper[i] = value[0];
        self.lower[i] = value[1];
    }

    pub fn norm_sqr(&self) -> f64 {
        let sum: f64 = self
            .upper
            .iter()
            .chain(&self.lower)
            .map(|a| a.norm_sqr())
            .sum();
        match self.repr {
            Representation::Position => sum * self.dz,
            Representation::Momentum => sum,
        }
    }

    /// `⟨self|other⟩`, with the measure of the current representation.
    pub fn inner(&self, other: &SpinorField) -> Result<Complex64> {
        self.expect_same(other)?;
        let sum: Complex64 = self
            .upper
            .iter()
            .zip(&other.upper)
            .chain(self.lower.iter().zip(&other.lower))
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(match self.repr {
            Representation::Position => sum * self.dz,
            Representation::Momentum => sum,
        })
    }

    fn expect_same(&self, other: &SpinorField) -> Result<()> {
        if self.repr != other.repr {
            return Err(Error::Representation {
                expected: self.repr,
                found: other.repr,
            });
        }
        if self.len() != other.len() {
            return Err(Error::GridMismatch(format!(
                "{} vs {} points",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }

    pub fn to_momentum(&self) -> Result<SpinorField> {
        SpectralTransform::new(self.len()).to_momentum(self)
    }

    pub fn to_position(&self) -> Result<SpinorField> {
        SpectralTransform::new(self.len()).to_position(self)
    }
}

/// Planned forward/inverse FFTs for one grid size.
#[derive(Clone)]
pub struct SpectralTransform {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralTransform").field("n", &self.n).finish()
    }
}

impl SpectralTransform {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unnormalised forward DFT in place; `buf.len()` must be a multiple of
    /// the planned length.
    pub fn forward_raw(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.forward.process_with_scratch(buf, scratch);
    }

    /// Unnormalised inverse DFT in place.
    pub fn inverse_raw(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inverse.process_with_scratch(buf, scratch);
    }

    pub fn scratch_len(&self) -> usize {
        self.forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len())
    }

    pub fn to_momentum(&self, field: &SpinorField) -> Result<SpinorField> {
        self.check(field, Representation::Position)?;
        let scale = (field.dz / self.n as f64).sqrt();
        let mut out = field.clone();
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.scratch_len()];
        for comp in [&mut out.upper, &mut out.lower] {
            self.forward.process_with_scratch(comp, &mut scratch);
            comp.iter_mut().for_each(|a| *a *= scale);
            // FFT order -> ascending signed modes
            comp.rotate_right(self.n / 2);
        }
        out.repr = Representation::Momentum;
        Ok(out)
    }

    pub fn to_position(&self, field: &SpinorField) -> Result<SpinorField> {
        self.check(field, Representation::Momentum)?;
        let scale = 1.0 / (field.dz * self.n as f64).sqrt();
        let mut out = field.clone();
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.scratch_len()];
        for comp in [&mut out.upper, &mut out.lower] {
            comp.rotate_left(self.n / 2);
            self.inverse.process_with_scratch(comp, &mut scratch);
            comp.iter_mut().for_each(|a| *a *= scale);
        }
        out.repr = Representation::Position;
        Ok(out)
    }

    fn check(&self, field: &SpinorField, expected: Representation) -> Result<()> {
        if field.repr != expected {
            return Err(Error::Representation {
                expected,
                found: field.repr,
            });
        }
        if field.len() != self.n {
            return Err(Error::GridMismatch(format!(
                "transform planned for {} points, field has {}",
                self.n,
                field.len()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_field(grid: &Grid, seed: u64) -> SpinorField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || -> Vec<Complex64> {
            (0..grid.len())
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        };
        let upper = draw();
        let lower = draw();
        SpinorField::from_components(grid, Representation::Position, upper, lower).unwrap()
    }

    #[test]
    fn constant_field_lands_in_mode_zero() {
        let grid = Grid::new(2.0, 16).unwrap();
        let n = grid.len();
        let f = SpinorField::from_components(
            &grid,
            Representation::Position,
            vec![c(0.3, -0.2); n],
            vec![c(-1.1, 0.5); n],
        )
        .unwrap();
        let m = f.to_momentum().unwrap();
        let zero = grid.ordinal(0);
        for i in 0..n {
            if i == zero {
                assert!(m.upper()[i].norm() > 0.1);
                assert!(m.lower()[i].norm() > 0.1);
            } else {
                assert!(m.upper()[i].norm() < 1e-14);
                assert!(m.lower()[i].norm() < 1e-14);
            }
        }
        assert!((m.norm_sqr() - f.norm_sqr()).abs() < 1e-13);
    }

    #[test]
    fn plane_wave_is_a_delta() {
        let grid = Grid::new(2.0, 32).unwrap();
        let k = -5;
        let p = grid.momentum(k);
        let upper: Vec<_> = grid
            .positions()
            .iter()
            .map(|&z| Complex64::from_polar(1.0, p * z))
            .collect();
        let f = SpinorField::from_components(
            &grid,
            Representation::Position,
            upper,
            vec![c(0.0, 0.0); grid.len()],
        )
        .unwrap();
        let m = f.to_momentum().unwrap();
        for mode in grid.modes() {
            let a = m.upper()[grid.ordinal(mode)].norm();
            if mode == k {
                assert!((a * a - f.norm_sqr()).abs() < 1e-12);
            } else {
                assert!(a < 1e-12, "mode {mode}: {a}");
            }
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        let grid = Grid::new(2.0, 64).unwrap();
        let f = random_field(&grid, 7);
        let t = SpectralTransform::new(grid.len());
        let m = t.to_momentum(&f).unwrap();
        let back = t.to_position(&m).unwrap();
        let scale = f.norm_sqr().sqrt();
        for i in 0..grid.len() {
            let d0 = (back.at(i)[0] - f.at(i)[0]).norm();
            let d1 = (back.at(i)[1] - f.at(i)[1]).norm();
            assert!(d0.max(d1) / scale < 1e-12);
        }
        assert!((m.norm_sqr() - f.norm_sqr()).abs() / f.norm_sqr() < 1e-12);
    }

    #[test]
    fn representation_mismatch() {
        let grid = Grid::new(2.0, 8).unwrap();
        let f = SpinorField::zeros(&grid, Representation::Momentum);
        assert!(matches!(f.to_momentum(), Err(Error::Representation { .. })));
        let g = SpinorField::zeros(&grid, Representation::Position);
        assert!(matches!(g.to_position(), Err(Error::Representation { .. })));
        assert!(f.inner(&g).is_err());
    }
}
