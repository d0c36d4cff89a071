//! Matrix functions via eigendecomposition, plus expectation values.

use std::f64::consts::TAU;

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dynamics::{ComplexMatrix, StateVector};
use crate::error::{Error, Result};

/// Maximum ‖U†U − I‖_F accepted as unitary.
pub const UNITARY_TOL: f64 = 1e-10;

/// Eigenphases closer than this to the 0/2π cut are numerical zeros.
pub const BRANCH_SNAP: f64 = 1e-12;

/// Eigenphases in `(2π − BRANCH_AMBIGUITY, 2π − BRANCH_SNAP)` are rejected.
pub const BRANCH_AMBIGUITY: f64 = 1e-9;

fn hermitian_eigen(h: &ComplexMatrix) -> (Vec<f64>, DMatrix<Complex64>) {
    let eig = SymmetricEigen::new(h.as_nalgebra().clone());
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// V·diag(values)·V†
fn reassemble(vectors: &DMatrix<Complex64>, values: &[Complex64]) -> DMatrix<Complex64> {
    let mut scaled = vectors.clone();
    for (j, &v) in values.iter().enumerate() {
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= v);
    }
    scaled * vectors.adjoint()
}

/// exp(i·scale·H) for Hermitian `H`.
pub fn expm_hermitian(h: &ComplexMatrix, scale: f64) -> Result<ComplexMatrix> {
    h.ensure_hermitian()?;
    if !scale.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite scale {scale}")));
    }
    let (values, vectors) = hermitian_eigen(h);
    let phases: Vec<Complex64> = values
        .iter()
        .map(|&e| Complex64::from_polar(1.0, scale * e))
        .collect();
    Ok(ComplexMatrix::wrap(reassemble(&vectors, &phases)))
}

/// Eigenvalues and orthonormal eigenvectors (as columns) of a unitary matrix.
///
/// The unitary is rotated to V = e^{iφ}U with no eigenvalue near −1 and sent
/// through the Cayley map i(1 − V)(1 + V)⁻¹. That matrix is Hermitian with
/// eigenvalues tan((θ+φ)/2), one-to-one in the eigenphase θ, so a symmetric
/// eigensolver separates every distinct eigenvalue and handles exact
/// degeneracies. Eigenvalues are Rayleigh quotients of U.
pub fn unitary_eigen(u: &ComplexMatrix) -> Result<(Vec<Complex64>, ComplexMatrix)> {
    let defect = u.unitarity_defect();
    if defect > UNITARY_TOL {
        return Err(Error::InvalidMatrix(format!(
            "not unitary (‖U†U − I‖_F = {defect:e})"
        )));
    }
    let n = u.dim();
    if n == 1 {
        return Ok((vec![u.get(0, 0)], ComplexMatrix::identity(1)));
    }
    let m = u.as_nalgebra();
    let id = DMatrix::<Complex64>::identity(n, n);
    // Among 2n evenly spaced rotations one keeps every eigenvalue at least
    // π/(2n) away from −1; take the best conditioned.
    let (_, phi) = (0..2 * n)
        .map(|k| {
            let phi = TAU * k as f64 / (2 * n) as f64;
            let plus = &id + m * Complex64::from_polar(1.0, phi);
            let sigma_min = plus.singular_values().iter().copied().fold(f64::INFINITY, f64::min);
            (sigma_min, phi)
        })
        .fold((f64::NEG_INFINITY, 0.0), |best, c| if c.0 > best.0 { c } else { best });
    let v = m * Complex64::from_polar(1.0, phi);
    let inv = (&id + &v)
        .try_inverse()
        .ok_or_else(|| Error::InvalidMatrix("singular Cayley denominator".into()))?;
    let cayley = ComplexMatrix::wrap((&id - &v) * inv * Complex64::i()).hermitian_part();
    let (_, vectors) = hermitian_eigen(&cayley);
    let values = (0..n)
        .map(|k| {
            let col = vectors.column(k);
            (col.adjoint() * m * col)[(0, 0)]
        })
        .collect();
    Ok((values, ComplexMatrix::wrap(vectors)))
}

/// Maps an eigenvalue e^{−iθ} of a propagator to the phase θ ∈ [0, 2π) on the
/// nonnegative branch.
fn nonneg_phase(lambda: Complex64) -> Result<f64> {
    let phase = (-lambda.arg()).rem_euclid(TAU);
    let to_cut = TAU - phase;
    if phase <= BRANCH_SNAP || to_cut <= BRANCH_SNAP {
        Ok(0.0)
    } else if to_cut < BRANCH_AMBIGUITY {
        Err(Error::BranchAmbiguity { phase })
    } else {
        Ok(phase)
    }
}

/// Effective Hamiltonian H_eff with U = exp(−i·tau·H_eff), choosing each
/// eigenvalue in [0, 2π/tau) so the spectrum is nonnegative and minimal.
pub fn logm_principal_nonneg(u: &ComplexMatrix, tau: f64) -> Result<ComplexMatrix> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidDuration(tau));
    }
    let (values, vectors) = unitary_eigen(u)?;
    let energies = values
        .iter()
        .map(|&l| nonneg_phase(l).map(|p| Complex64::new(p / tau, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    let h = ComplexMatrix::wrap(reassemble(vectors.as_nalgebra(), &energies));
    Ok(h.hermitian_part())
}

fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionError { expected, got })
    }
}

/// ⟨ψ|A|ψ⟩ for Hermitian `A`.
pub fn expectation(psi: &StateVector, a: &ComplexMatrix) -> Result<f64> {
    a.ensure_hermitian()?;
    check_dims(a.dim(), psi.dim())?;
    Ok(raw_expectation(psi, a))
}

pub(crate) fn raw_expectation(psi: &StateVector, a: &ComplexMatrix) -> f64 {
    let v = psi.as_nalgebra();
    (v.adjoint() * a.as_nalgebra() * v)[(0, 0)].re
}

/// ⟨A²⟩ − ⟨A⟩², evaluated as ‖(A − ⟨A⟩)ψ‖² so it is nonnegative by
/// construction.
pub fn variance(psi: &StateVector, a: &ComplexMatrix) -> Result<f64> {
    a.ensure_hermitian()?;
    check_dims(a.dim(), psi.dim())?;
    Ok(raw_variance(psi, a))
}

pub(crate) fn raw_variance(psi: &StateVector, a: &ComplexMatrix) -> f64 {
    let v = psi.as_nalgebra();
    let mean = raw_expectation(psi, a);
    let centered: DVector<Complex64> = a.as_nalgebra() * v - v.map(|z| z * mean);
    centered.iter().map(|z| z.norm_sqr()).sum()
}

/// ⟨ψ|φ⟩
pub fn overlap(psi: &StateVector, phi: &StateVector) -> Result<Complex64> {
    check_dims(psi.dim(), phi.dim())?;
    Ok(psi
        .amplitudes()
        .iter()
        .zip(phi.amplitudes())
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Finds a state |ψ⟩ with |⟨ψ|U|ψ⟩| ≤ `tol`, i.e. one that `U` maps to an
/// (almost) orthogonal state. Returns the state and the achieved overlap
/// magnitude, or `None` when 0 is not inside the convex hull of the spectrum.
pub fn orthogonalizing_state(u: &ComplexMatrix, tol: f64) -> Result<Option<(StateVector, f64)>> {
    let (values, vectors) = unitary_eigen(u)?;
    let n = values.len();
    let column = |k: usize| -> DVector<Complex64> { vectors.as_nalgebra().column(k).into_owned() };

    let mut best_pair: Option<(usize, usize, f64)> = None;
    for i in 0..n {
        for j in i + 1..n {
            let ov = ((values[i] + values[j]) * 0.5).norm();
            if best_pair.is_none_or(|(_, _, b)| ov < b) {
                best_pair = Some((i, j, ov));
            }
        }
    }
    if let Some((i, j, ov)) = best_pair {
        if ov <= tol {
            let v = (column(i) + column(j)).map(|z| z * std::f64::consts::FRAC_1_SQRT_2);
            let psi = StateVector::normalized(v.iter().copied().collect())?;
            return Ok(Some((psi, ov)));
        }
    }

    // 0 strictly inside a triangle of eigenvalues: barycentric weights.
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if let Some(w) = barycentric_origin(values[i], values[j], values[k]) {
                    let v = column(i).map(|z| z * w[0].sqrt())
                        + column(j).map(|z| z * w[1].sqrt())
                        + column(k).map(|z| z * w[2].sqrt());
                    let psi = StateVector::normalized(v.iter().copied().collect())?;
                    let ov = (values[i] * w[0] + values[j] * w[1] + values[k] * w[2]).norm();
                    if ov <= tol {
                        return Ok(Some((psi, ov)));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn barycentric_origin(a: Complex64, b: Complex64, c: Complex64) -> Option<[f64; 3]> {
    let det = (b.re - a.re) * (c.im - a.im) - (c.re - a.re) * (b.im - a.im);
    if det.abs() < 1e-12 {
        return None;
    }
    let wb = ((-a.re) * (c.im - a.im) - (c.re - a.re) * (-a.im)) / det;
    let wc = ((b.re - a.re) * (-a.im) - (-a.re) * (b.im - a.im)) / det;
    let wa = 1.0 - wb - wc;
    (wa > 0.0 && wb > 0.0 && wc > 0.0).then_some([wa, wb, wc])
}

/// Eigenvalues in ascending order with matching eigenvector columns.
pub fn eigh(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    h.ensure_hermitian()?;
    let (values, vectors) = hermitian_eigen(h);
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted = order.iter().map(|&k| values[k]).collect();
    let columns = DMatrix::from_fn(values.len(), values.len(), |r, c| vectors[(r, order[c])]);
    Ok((sorted, ComplexMatrix::wrap(columns)))
}

/// Spectral spread (max − min eigenvalue) of a Hermitian matrix.
pub fn spectral_spread(h: &ComplexMatrix) -> Result<f64> {
    h.ensure_hermitian()?;
    let (values, _) = hermitian_eigen(h);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(max - min)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    h.ensure_hermitian()?;
    let (values, _) = hermitian_eigen(h);
    Ok(values.iter().copied().fold(f64::INFINITY, f64::min))
}
