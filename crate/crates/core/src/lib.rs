//! Desk-scale numerics for the quantized nonlocal nonlinear Schrödinger
//! equation.
//!
//! The crate is organized bottom-up:
//!
//! - [`lattice`]: periodic box, momentum and position grids, and every
//!   continuum-to-discrete normalization convention.
//! - [`fock`]: bosonic occupation states, sector bases and ladder operators.
//! - [`qoperators`]: sector matrices of `H₀`, `V`, `N`, `P` and the parity
//!   operator, with two independent constructions of the contact interaction.
//! - [`metric`]: Wick-contraction vacuum expectations, the Dirac and parity
//!   Gram matrices, and the parity adjoint.
//! - [`spectra`]: exact diagonalization, the reduced-resolvent
//!   Lippmann–Schwinger series and cutoff sweeps.
//! - [`bethe`]: S-matrix, Gaudin-form wavefunctions, cusp and
//!   finite-difference checks, and the ring Bethe equations.
//! - [`classical`]: split-step integration of the classical nonlocal field
//!   and its conserved charges.
//! - [`export`]: CSV / JSON writers shared by the command-line front end.

pub mod bethe;
pub mod classical;
pub mod error;
pub mod export;
pub mod fock;
pub mod lattice;
pub mod metric;
pub mod qoperators;
pub mod spectra;

pub use error::{NnlsError, NnlsResult};

pub use num_complex::Complex64 as C64;

/// Dense complex matrix used for every sector operator.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;
