//! Numerical workbench for the free-fermion operators attached to degenerate
//! Riemann surfaces: truncated fermionic Fock space, vertex-operator modes,
//! smeared Virasoro semigroups, Koenigs semigroups of the disk with their
//! weighted composition operators, pants/annulus operators with commutation
//! certificates, and second-quantized implementing operators.
//!
//! Everything is computed at a finite energy cutoff `N` (half-integer) and a
//! finite Fourier band `M` on the circle. Each assembled operator carries an
//! *exactness window*: the largest energy level below which its truncated
//! matrix columns coincide with the compression of the untruncated operator.
//! Verification routines only assert identities inside the recorded windows.

pub mod boundary;
pub mod error;
pub mod fock;
pub mod geometry;
pub mod implementing;
pub mod linalg;
pub mod net;
pub mod segal;
pub mod sparse;
pub mod virasoro;
pub mod voa;

pub use num_complex::Complex64;

/// Doubled half-integer energies: an `Energy2` of `2E` represents level `E`.
pub type Energy2 = i64;
