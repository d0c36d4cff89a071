use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Allowed deviation of ‖ψ‖² from 1.
pub const NORM_TOL: f64 = 1e-10;

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    inner: DVector<Complex64>,
}

impl StateVector {
    /// Accepts amplitudes that are already normalized to within [`NORM_TOL`].
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("empty state".into()));
        }
        let n2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if !n2.is_finite() || (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized((n2 - 1.0).abs()));
        }
        Ok(Self {
            inner: DVector::from_vec(amplitudes),
        })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if amplitudes.is_empty() || !n2.is_finite() || n2 == 0.0 {
            return Err(Error::InvalidArgument(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        let inv = 1.0 / n2.sqrt();
        Ok(Self {
            inner: DVector::from_iterator(amplitudes.len(), amplitudes.into_iter().map(|z| z * inv)),
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis state |k⟩.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {k} out of range for dimension {dim}"
            )));
        }
        let mut v = DVector::zeros(dim);
        v[k] = Complex64::new(1.0, 0.0);
        Ok(Self { inner: v })
    }

    pub(crate) fn wrap(inner: DVector<Complex64>) -> Self {
        Self { inner }
    }

    pub fn dim(&self) -> usize {
        self.inner.len()
    }

    pub fn amplitude(&self, k: usize) -> Complex64 {
        self.inner[k]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.inner.as_slice()
    }

    pub fn as_nalgebra(&self) -> &DVector<Complex64> {
        &self.inner
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.inner.iter().map(|z| z.norm_sqr()).collect()
    }
}
