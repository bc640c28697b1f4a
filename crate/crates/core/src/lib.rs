//! Numerical laboratory for the duality between sampling and interpolation in
//! Paley–Wiener spaces.
//!
//! The crate is organised by subsystem:
//!
//! - [`sets`]: uniformly discrete point sets, separation constants, uniform
//!   densities, lattice complements, perturbations and lattice rounding.
//! - [`spectra`]: spectra as finite unions of disjoint closed intervals.
//! - [`exponential`]: Gram matrices of exponential systems, Riesz, Bessel and
//!   frame bound estimates, closed-form test functions.
//! - [`duality`]: the frame/Riesz-sequence duality for orthogonal
//!   decompositions and its exact discrete analog over `Z_N`.
//! - [`stability`]: restriction operators and their perturbation bounds.
//! - [`experiments`]: density sweeps, the density-complement pipeline, the
//!   disconnected-spectrum demonstration and the alternating-sum check, with
//!   a config-driven runner.
//!
//! Inner products on `L²(S)` use the measure `dt/2π`, so that the integer
//! exponentials are orthonormal on `[-π, π]` and critical densities come out
//! as `mes(S)/2π`.

pub mod duality;
pub mod error;
pub mod experiments;
pub mod exponential;
pub mod linalg;
pub mod quadrature;
pub mod sets;
pub mod spectra;
pub mod stability;

pub use error::{Error, Result};
pub use exponential::{BoundKind, BoundsEstimate, GramMatrix, TestFunction};
pub use sets::{DensityEstimate, Perturbation, UdSet};
pub use spectra::Spectrum;

pub use num_complex::Complex64;

/// Dense complex matrix used throughout the crate.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<Complex64>;
