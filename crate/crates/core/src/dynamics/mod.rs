//! Dense linear algebra and unitary propagation for small Hilbert spaces.

mod functions;
mod matrix;
mod propagate;
mod state;
mod trajectory;

pub use functions::{
    eigh, expectation, expm_hermitian, logm_principal_nonneg, min_eigenvalue, orthogonalizing_state,
    overlap, spectral_spread, unitary_eigen, variance, BRANCH_AMBIGUITY, BRANCH_SNAP,
    UNITARY_TOL,
};
pub use matrix::{ComplexMatrix, HERMITIAN_TOL};
pub use propagate::{midpoint_hamiltonians, propagate, propagate_unitary, Propagation, MIN_STEPS};
pub use state::{StateVector, NORM_TOL};
pub use trajectory::{HamiltonianTrajectory, Smoothness};
