//! Pair creation in Sauter potential wells.
//!
//! The crate propagates the one-dimensional, single-spin Dirac equation
//! `H = c σ₁ p + σ₃ c² + V(z, t)` with a Strang split-operator scheme on a
//! periodic box. Every negative-energy plane wave of the free Hamiltonian is
//! evolved independently; the projections of the evolved states onto the
//! positive-energy plane waves form the transition amplitudes `U_pn`, from
//! which the created-electron spectrum, yield and spatial density follow.
//!
//! Module map:
//!
//! * [`config`], [`grid`], [`spinor`]: run parameters, conjugate grids and
//!   the unitary position/momentum transform.
//! * [`free_basis`]: field-free energies and spinors.
//! * [`fields`]: well shapes, the switching envelope and `V(z, t)`.
//! * [`propagator`]: kinetic factors, the split step, column-parallel
//!   evolution and the `U_pn` checkpoint format.
//! * [`oracle`]: dense-matrix reference propagation for small grids.
//! * [`observables`]: spectrum, yield and density.
//! * [`bound_states`]: the well's bound-state ladder and multi-photon peak
//!   assignment.

pub mod bound_states;
pub mod config;
pub mod error;
pub mod fields;
pub mod free_basis;
pub mod grid;
pub mod observables;
pub mod oracle;
pub mod propagator;
pub mod spinor;

pub use bound_states::{BoundStateSet, PeakMatchReport};
pub use config::{SimulationConfig, WellShape};
pub use error::{Error, Result};
pub use fields::FieldSampler;
pub use free_basis::{Branch, FreeBasis};
pub use grid::Grid;
pub use observables::{DensityResult, SpectrumResult, TimeSeriesResult};
pub use propagator::{EvolutionSchedule, TransitionMatrix};
pub use spinor::{Representation, SpinorField};

pub use num_complex::Complex64;
