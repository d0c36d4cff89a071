//! Dense small-dimension quantum dynamics and the speed-limit machinery built
//! on top of it.
//!
//! Everything in this crate works in natural units with ℏ = 1: Hamiltonians
//! are angular frequencies (rad/s) and times are seconds. [`units::Energy`]
//! converts to joules at the reporting boundary.

pub mod dynamics;
pub mod error;
pub mod magnus;
pub mod qsl;
pub mod units;
pub mod verify;

pub use dynamics::{
    expectation, expm_hermitian, logm_principal_nonneg, orthogonalizing_state, overlap,
    propagate, unitary_eigen, variance, ComplexMatrix, HamiltonianTrajectory, Propagation,
    Smoothness, StateVector,
};
pub use error::{Error, Result};
pub use units::{Energy, HBAR};
