//! Field-free Dirac eigensystem on the momentum grid.
//!
//! For each mode, `H₀(p) = [[c², cp], [cp, −c²]]` has eigenvalues `±E` with
//! `E = √(c²p² + c⁴)`. The spinors are real:
//! `u ∝ (1, cp/(E + c²))` and `v ∝ (−cp/(E + c²), 1)`, which fixes the
//! phase convention (first component of `u` and second of `v` positive).
//!
//! The Nyquist mode `−Nz/2` is the one grid mode without a mirror partner:
//! `e^{iπj}` carries no momentum sign. Its odd `σ₁` coupling is dropped and
//! its energy kept, `H₀ = σ₃ E(p)`, which makes the discrete problem exactly
//! symmetric under `z → −z` (see [`mode_coefficients`]).

use num_complex::Complex64;

use crate::error::Result;
use crate::grid::Grid;
use crate::spinor::{Representation, SpinorField};

/// `√(c²p² + c⁴)`.
pub fn free_energy(p: f64, c: f64) -> f64 {
    let cp = c * p;
    let c2 = c * c;
    cp.hypot(c2)
}

/// `H₀(p)` as a real symmetric 2×2 matrix.
pub fn free_hamiltonian(p: f64, c: f64) -> [[f64; 2]; 2] {
    let c2 = c * c;
    [[c2, c * p], [c * p, -c2]]
}

/// `(a, b)` with `H₀ = a σ₁ + b σ₃` for signed mode `mode` of `grid`:
/// `(cp, c²)` for ordinary modes and `(0, E(p))` for the Nyquist mode.
/// Either way `√(a² + b²) = E(p)`.
pub fn mode_coefficients(grid: &Grid, mode: i64, c: f64) -> (f64, f64) {
    let p = grid.momentum(mode);
    if mode == grid.min_mode() {
        (0.0, free_energy(p, c))
    } else {
        (c * p, c * c)
    }
}

/// The per-mode free Hamiltonian used by the propagator and the oracle.
pub fn mode_hamiltonian(grid: &Grid, mode: i64, c: f64) -> [[f64; 2]; 2] {
    let (a, b) = mode_coefficients(grid, mode, c);
    [[b, a], [a, -b]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Positive,
    Negative,
}

#[derive(Debug, Clone)]
pub struct FreeBasis {
    grid: Grid,
    c: f64,
    energies: Vec<f64>,
    positive: Vec<[f64; 2]>,
    negative: Vec<[f64; 2]>,
}

impl FreeBasis {
    pub fn new(grid: &Grid, c: f64) -> Self {
        let mut energies = Vec::with_capacity(grid.len());
        let mut positive = Vec::with_capacity(grid.len());
        let mut negative = Vec::with_capacity(grid.len());
        for k in grid.modes() {
            let (a, b) = mode_coefficients(grid, k, c);
            let e = a.hypot(b);
            energies.push(e);
            if a == 0.0 {
                positive.push([1.0, 0.0]);
                negative.push([0.0, 1.0]);
            } else {
                let ratio = a / (e + b);
                let norm = 1.0 / (1.0 + ratio * ratio).sqrt();
                positive.push([norm, ratio * norm]);
                negative.push([-ratio * norm, norm]);
            }
        }
        Self {
            grid: grid.clone(),
            c,
            energies,
            positive,
            negative,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `E_k` for signed mode `k`.
    pub fn energy(&self, mode: i64) -> f64 {
        self.energies[self.grid.ordinal(mode)]
    }

    /// Energies in ascending mode order.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Spinor by ascending-order ordinal.
    pub fn spinor_at(&self, ordinal: usize, branch: Branch) -> [f64; 2] {
        match branch {
            Branch::Positive => self.positive[ordinal],
            Branch::Negative => self.negative[ordinal],
        }
    }

    pub fn spinor(&self, mode: i64, branch: Branch) -> [f64; 2] {
        self.spinor_at(self.grid.ordinal(mode), branch)
    }

    /// Normalised momentum-space plane wave: all amplitude in `mode`,
    /// carrying `u_k` or `v_k`.
    pub fn plane_wave_state(&self, mode: i64, branch: Branch) -> Result<SpinorField> {
        self.grid.check_mode(mode)?;
        let mut field = SpinorField::zeros(&self.grid, Representation::Momentum);
        let s = self.spinor(mode, branch);
        field.set(
            self.grid.ordinal(mode),
            [Complex64::new(s[0], 0.0), Complex64::new(s[1], 0.0)],
        );
        Ok(field)
    }

    /// `u_k† ψ̃_k` (or `v_k† ψ̃_k`) for every mode of a momentum-space field,
    /// in ascending mode order.
    pub fn project(&self, field: &SpinorField, branch: Branch) -> Result<Vec<Complex64>> {
        if field.representation() != Representation::Momentum {
            return Err(crate::Error::Representation {
                expected: Representation::Momentum,
                found: field.representation(),
            });
        }
        if field.len() != self.grid.len() {
            return Err(crate::Error::GridMismatch(format!(
                "basis of {} modes, field of {}",
                self.grid.len(),
                field.len()
            )));
        }
        Ok((0..field.len())
            .map(|i| {
                let s = self.spinor_at(i, branch);
                let [a, b] = field.at(i);
                a * s[0] + b * s[1]
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const C: f64 = 137.036;

    fn c2() -> f64 {
        C * C
    }

    #[test]
    fn rest_energy() {
        assert_eq!(free_energy(0.0, C), c2());
    }

    #[test]
    fn tabulated_mode_energies() {
        let grid = Grid::new(2.0, 2048).unwrap();
        let e = |k| free_energy(grid.momentum(k), C) / c2();
        assert!((e(58) - 1.6637).abs() < 1e-3);
        assert!((e(254) - 5.9083).abs() < 1e-3);
    }

    #[test]
    fn zero_mode_is_diagonal() {
        let grid = Grid::new(2.0, 16).unwrap();
        let basis = FreeBasis::new(&grid, C);
        assert_eq!(basis.spinor(0, Branch::Positive), [1.0, 0.0]);
        assert_eq!(basis.spinor(0, Branch::Negative), [0.0, 1.0]);
    }

    #[test]
    fn nyquist_mode_is_diagonal_with_full_energy() {
        let grid = Grid::new(2.0, 16).unwrap();
        let basis = FreeBasis::new(&grid, C);
        let e = free_energy(grid.momentum(-8), C);
        assert_eq!(mode_hamiltonian(&grid, -8, C), [[e, 0.0], [0.0, -e]]);
        assert_eq!(basis.energy(-8), e);
        assert_eq!(basis.spinor(-8, Branch::Positive), [1.0, 0.0]);
        assert_eq!(basis.spinor(-8, Branch::Negative), [0.0, 1.0]);
    }

    #[test]
    fn eigenrelations_and_completeness() {
        let grid = Grid::new(2.0, 256).unwrap();
        let basis = FreeBasis::new(&grid, C);
        for k in grid.modes() {
            let h = mode_hamiltonian(&grid, k, C);
            let e = basis.energy(k);
            assert_eq!(e, free_energy(grid.momentum(k), C));
            if k != grid.min_mode() {
                assert_eq!(h, free_hamiltonian(grid.momentum(k), C));
            }
            for (branch, sign) in [(Branch::Positive, 1.0), (Branch::Negative, -1.0)] {
                let s = basis.spinor(k, branch);
                let hs = [
                    h[0][0] * s[0] + h[0][1] * s[1],
                    h[1][0] * s[0] + h[1][1] * s[1],
                ];
                for i in 0..2 {
                    assert!((hs[i] - sign * e * s[i]).abs() <= 1e-10 * e);
                }
                assert!((s[0] * s[0] + s[1] * s[1] - 1.0).abs() < 1e-14);
            }
            let u = basis.spinor(k, Branch::Positive);
            let v = basis.spinor(k, Branch::Negative);
            assert!((u[0] * v[0] + u[1] * v[1]).abs() < 1e-14);
            // u u† + v v† = I
            assert!((u[0] * u[0] + v[0] * v[0] - 1.0).abs() < 1e-14);
            assert!((u[1] * u[1] + v[1] * v[1] - 1.0).abs() < 1e-14);
            assert!((u[0] * u[1] + v[0] * v[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn plane_waves() {
        let grid = Grid::new(2.0, 32).unwrap();
        let basis = FreeBasis::new(&grid, C);
        let up = basis.plane_wave_state(0, Branch::Positive).unwrap();
        assert_eq!(up.at(grid.ordinal(0)), [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        for k in [-16, -3, 0, 7, 15] {
            let a = basis.plane_wave_state(k, Branch::Positive).unwrap();
            let b = basis.plane_wave_state(k, Branch::Negative).unwrap();
            assert!((a.norm_sqr() - 1.0).abs() < 1e-14);
            assert!(a.inner(&b).unwrap().norm() < 1e-14);
        }
        assert!(basis.plane_wave_state(16, Branch::Positive).is_err());
        assert!(basis.plane_wave_state(-17, Branch::Negative).is_err());
    }

    proptest! {
        #[test]
        fn energy_even_and_increasing(p in 0.0f64..5000.0, dp in 1e-3f64..100.0) {
            prop_assert_eq!(free_energy(p, C), free_energy(-p, C));
            prop_assert!(free_energy(p + dp, C) > free_energy(p, C));
        }

        #[test]
        fn random_pairs_orthonormal(
            k1 in -64i64..64, k2 in -64i64..64, b1 in any::<bool>(), b2 in any::<bool>()
        ) {
            let grid = Grid::new(2.0, 128).unwrap();
            let basis = FreeBasis::new(&grid, C);
            let br = |b: bool| if b { Branch::Positive } else { Branch::Negative };
            let s1 = basis.plane_wave_state(k1, br(b1)).unwrap().to_position().unwrap();
            let s2 = basis.plane_wave_state(k2, br(b2)).unwrap().to_position().unwrap();
            let overlap = s1.inner(&s2).unwrap().norm();
            let expected = if k1 == k2 && b1 == b2 { 1.0 } else { 0.0 };
            prop_assert!((overlap - expected).abs() < 1e-12);
        }
    }
}
