//! Conjugate position and momentum grids on the periodic box.
//!
//! Positions are `z_j = −L/2 + j·Δz`, `j = 0..Nz`. Momentum modes carry the
//! signed index `N_p ∈ [−Nz/2, Nz/2)` with `p = 2π N_p / L`. Public APIs
//! that return per-mode data order it by ascending `N_p`; the FFT storage
//! order is only visible through [`Grid::fft_slot`].

use std::f64::consts::PI;

use crate::config::SimulationConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nz: usize,
    length: f64,
}

impl Grid {
    pub fn new(length: f64, nz: usize) -> Result<Self> {
        if nz < 2 || !nz.is_power_of_two() {
            return Err(Error::config(
                "Nz",
                format!("must be a power of two >= 2, got {nz}"),
            ));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::config("L", format!("must be > 0, got {length}")));
        }
        Ok(Self { nz, length })
    }

    pub fn from_config(config: &SimulationConfig) -> Result<Self> {
        Self::new(config.box_length, config.nz)
    }

    pub fn len(&self) -> usize {
        self.nz
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dz(&self) -> f64 {
        self.length / self.nz as f64
    }

    pub fn dp(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn position(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.dz()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.nz).map(|j| self.position(j)).collect()
    }

    pub fn min_mode(&self) -> i64 {
        -(self.nz as i64 / 2)
    }

    pub fn max_mode(&self) -> i64 {
        self.nz as i64 / 2 - 1
    }

    /// Signed mode indices in ascending order.
    pub fn modes(&self) -> impl Iterator<Item = i64> + '_ {
        self.min_mode()..=self.max_mode()
    }

    pub fn momentum(&self, mode: i64) -> f64 {
        mode as f64 * self.dp()
    }

    /// Momenta in ascending mode order.
    pub fn momenta(&self) -> Vec<f64> {
        self.modes().map(|k| self.momentum(k)).collect()
    }

    pub fn check_mode(&self, mode: i64) -> Result<()> {
        if mode < self.min_mode() || mode > self.max_mode() {
            return Err(Error::ModeOutOfRange {
                mode,
                min: self.min_mode(),
                max: self.max_mode(),
            });
        }
        Ok(())
    }

    /// Position of `mode` in ascending-mode order.
    pub fn ordinal(&self, mode: i64) -> usize {
        (mode - self.min_mode()) as usize
    }

    /// Signed mode at ascending-order position `ordinal`.
    pub fn mode_at(&self, ordinal: usize) -> i64 {
        ordinal as i64 + self.min_mode()
    }

    /// Slot of `mode` in FFT storage order (`0, 1, …, Nz/2−1, −Nz/2, …, −1`).
    pub fn fft_slot(&self, mode: i64) -> usize {
        mode.rem_euclid(self.nz as i64) as usize
    }

    /// Signed mode held in FFT storage slot `slot`.
    pub fn mode_of_slot(&self, slot: usize) -> i64 {
        let half = self.nz / 2;
        if slot < half {
            slot as i64
        } else {
            slot as i64 - self.nz as i64
        }
    }
}
