use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dynamics::StateVector;
use crate::error::{Error, Result};

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const CI: Complex64 = Complex64::new(0.0, 1.0);

/// Relative tolerance used when classifying a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Square dense complex matrix. Carries Hamiltonians (rad/s), unitaries and
/// generic operators.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Builds a `dim × dim` matrix from row-major entries.
    pub fn from_row_slice(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMatrix("dimension must be positive".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for dimension {dim}, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(dim, dim, entries),
        })
    }

    /// Wraps an existing nalgebra matrix.
    pub fn from_nalgebra(inner: DMatrix<Complex64>) -> Result<Self> {
        if !inner.is_square() || inner.nrows() == 0 {
            return Err(Error::InvalidMatrix(format!(
                "matrix must be square and non-empty, got {}x{}",
                inner.nrows(),
                inner.ncols()
            )));
        }
        if inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        Ok(Self { inner })
    }

    pub(crate) fn wrap(inner: DMatrix<Complex64>) -> Self {
        debug_assert!(inner.is_square());
        Self { inner }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self::wrap(DMatrix::from_fn(dim, dim, f))
    }

    pub fn identity(dim: usize) -> Self {
        Self::wrap(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::wrap(DMatrix::zeros(dim, dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |r, c| {
            if r == c {
                Complex64::new(diag[r], 0.0)
            } else {
                C0
            }
        })
    }

    pub fn pauli_x() -> Self {
        Self::wrap(DMatrix::from_row_slice(2, 2, &[C0, C1, C1, C0]))
    }

    pub fn pauli_y() -> Self {
        Self::wrap(DMatrix::from_row_slice(2, 2, &[C0, -CI, CI, C0]))
    }

    pub fn pauli_z() -> Self {
        Self::wrap(DMatrix::from_row_slice(2, 2, &[C1, C0, C0, -C1]))
    }

    /// |ψ⟩⟨ψ|
    pub fn projector(psi: &StateVector) -> Self {
        let v = psi.as_nalgebra();
        Self::wrap(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.inner[(row, col)]
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn into_nalgebra(self) -> DMatrix<Complex64> {
        self.inner
    }

    pub fn dagger(&self) -> Self {
        Self::wrap(self.inner.adjoint())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::wrap(self.inner.map(|z| z * s))
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self::wrap(self.inner.map(|z| z * s))
    }

    /// A ⊗ B
    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        Self::wrap(self.inner.kronecker(&other.inner))
    }

    pub fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max|A − A†|
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.inner[(r, c)] - self.inner[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= HERMITIAN_TOL * self.max_abs()
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        if self.is_hermitian() {
            Ok(())
        } else {
            Err(Error::InvalidMatrix(format!(
                "not Hermitian (max|A - A†| = {:e}, max|A| = {:e})",
                self.hermiticity_defect(),
                self.max_abs()
            )))
        }
    }

    /// (A + A†)/2
    pub fn hermitian_part(&self) -> Self {
        Self::wrap((&self.inner + self.inner.adjoint()).map(|z| z * 0.5))
    }

    /// ‖U†U − I‖_F
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let prod = self.inner.adjoint() * &self.inner;
        (prod - DMatrix::<Complex64>::identity(n, n))
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn commutator(&self, other: &ComplexMatrix) -> Self {
        Self::wrap(&self.inner * &other.inner - &other.inner * &self.inner)
    }

    pub fn apply(&self, psi: &StateVector) -> StateVector {
        StateVector::wrap(&self.inner * psi.as_nalgebra())
    }

    /// Matrix power by repeated squaring.
    pub fn pow(&self, mut exponent: u64) -> Self {
        let mut result = DMatrix::<Complex64>::identity(self.dim(), self.dim());
        let mut base = self.inner.clone();
        while exponent > 0 {
            if exponent & 1 == 1 {
                result = &result * &base;
            }
            exponent >>= 1;
            if exponent > 0 {
                base = &base * &base;
            }
        }
        Self::wrap(result)
    }

    /// Phase-insensitive gate fidelity |Tr(A†B)| / d.
    pub fn gate_fidelity(&self, other: &ComplexMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionError {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok((self.inner.adjoint() * &other.inner).trace().norm() / self.dim() as f64)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::wrap(&self.inner + &rhs.inner)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::wrap(&self.inner - &rhs.inner)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::wrap(&self.inner * &rhs.inner)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim(), self.dim())?;
        for r in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|c| {
                    let z = self.inner[(r, c)];
                    format!("{:+.4e}{:+.4e}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}
