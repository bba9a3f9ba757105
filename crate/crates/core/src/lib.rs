//! Simulation kernel for a pair of dissipatively coupled qubits whose
//! master-equation generator interpolates, via a jump weight q ∈ [0, 1],
//! between postselected no-jump evolution (q = 0, effective non-Hermitian
//! Hamiltonian) and the full Lindblad equation (q = 1).
//!
//! The generator has exceptional points in the (δ, γ) plane — detuning vs
//! dissipation strength — and slow closed loops around or near them transfer
//! Bell states chirally: the final state depends on the loop orientation, not
//! on the starting state. This crate provides the pieces needed to compute
//! that quantitatively:
//!
//! - [`linalg`]: dense complex matrices, matrix exponential, eigensolver;
//! - [`model`]: Hamiltonians, bath rates, Liouvillian superoperators;
//! - [`spectra`]: closed-form spectra, exceptional-point location, sweeps;
//! - [`dynamics`]: driving loops, time-ordered propagation, cycle propagator;
//! - [`metrics`]: Bell fidelity, concurrence, purity, symmetry checks.

pub mod dynamics;
mod error;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod spectra;

pub use error::{Error, Result};
