//! Pseudo-spectral solver for the parabolic-elliptic Keller-Segel system
//! coupled to 2-D Navier-Stokes near Couette flow, on the periodic strip
//! T x [-ly/2, ly/2).
//!
//! The crate provides:
//! - spectral grids, transforms and the sheared differential operators
//!   (z = x - t*y coordinates) as time-dependent Fourier symbols;
//! - the two elliptic solves (screened Poisson for the chemoattractant,
//!   Biot-Savart for the velocity);
//! - the arctan-type Fourier weight functions used to measure enhanced
//!   dissipation, with analytic derivatives and a randomized verification
//!   battery for their inequalities;
//! - an integrating-factor Heun stepper with blowup detection;
//! - diagnostics (mass, free energy, weighted norms, dissipation budgets,
//!   decay-rate fits) and checkpoint/report serialization.

pub mod checkpoint;
pub mod diagnostics;
pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod field;
pub mod grid;
pub mod ic;
pub mod multiplier;
pub mod report;

pub use error::{Error, Result};
pub use field::{Frame, SpectralField};
pub use grid::Grid;
