use std::fmt;
use std::sync::Arc;

use crate::dynamics::functions::min_eigenvalue;
use crate::dynamics::ComplexMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    /// Constant between breakpoints. Exact under the midpoint integrator when
    /// breakpoints fall on the step grid.
    PiecewiseConstant,
    Smooth,
}

type Evaluator = Arc<dyn Fn(f64) -> ComplexMatrix + Send + Sync>;

/// A time-dependent Hamiltonian H(t) on [0, T], in rad/s.
#[derive(Clone)]
pub struct HamiltonianTrajectory {
    dim: usize,
    duration: f64,
    smoothness: Smoothness,
    evaluator: Evaluator,
}

impl fmt::Debug for HamiltonianTrajectory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianTrajectory")
            .field("dim", &self.dim)
            .field("duration", &self.duration)
            .field("smoothness", &self.smoothness)
            .finish_non_exhaustive()
    }
}

fn check_duration(duration: f64) -> Result<()> {
    if duration > 0.0 && duration.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidDuration(duration))
    }
}

impl HamiltonianTrajectory {
    /// Wraps an arbitrary evaluator. The endpoints and midpoint are probed for
    /// the right dimension and Hermiticity.
    pub fn new(
        dim: usize,
        duration: f64,
        smoothness: Smoothness,
        evaluator: impl Fn(f64) -> ComplexMatrix + Send + Sync + 'static,
    ) -> Result<Self> {
        check_duration(duration)?;
        let traj = Self {
            dim,
            duration,
            smoothness,
            evaluator: Arc::new(evaluator),
        };
        for t in [0.0, 0.5 * duration, duration] {
            traj.checked(t)?;
        }
        Ok(traj)
    }

    pub fn constant(h: ComplexMatrix, duration: f64) -> Result<Self> {
        h.ensure_hermitian()?;
        let dim = h.dim();
        Self::new(dim, duration, Smoothness::PiecewiseConstant, move |_| h.clone())
    }

    /// Consecutive constant segments `(duration, H)`.
    pub fn piecewise_constant(segments: Vec<(f64, ComplexMatrix)>) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| Error::InvalidArgument("no segments".into()))?;
        let dim = first.1.dim();
        let mut ends = Vec::with_capacity(segments.len());
        let mut acc = 0.0;
        for (d, h) in &segments {
            check_duration(*d)?;
            h.ensure_hermitian()?;
            if h.dim() != dim {
                return Err(Error::DimensionError {
                    expected: dim,
                    got: h.dim(),
                });
            }
            acc += d;
            ends.push(acc);
        }
        let total = acc;
        let mats: Vec<ComplexMatrix> = segments.into_iter().map(|(_, h)| h).collect();
        Self::new(dim, total, Smoothness::PiecewiseConstant, move |t| {
            let idx = ends.partition_point(|&e| e <= t).min(mats.len() - 1);
            mats[idx].clone()
        })
    }

    /// H(t) = envelope(t)·G.
    pub fn enveloped(
        generator: ComplexMatrix,
        duration: f64,
        envelope: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        generator.ensure_hermitian()?;
        let dim = generator.dim();
        Self::new(dim, duration, Smoothness::Smooth, move |t| {
            generator.scale(envelope(t))
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    /// H(t), with `t` clamped into [0, T].
    pub fn evaluate(&self, t: f64) -> ComplexMatrix {
        (self.evaluator)(t.clamp(0.0, self.duration))
    }

    /// H(t) after checking dimension and Hermiticity.
    pub fn checked(&self, t: f64) -> Result<ComplexMatrix> {
        let h = self.evaluate(t);
        if h.dim() != self.dim {
            return Err(Error::DimensionError {
                expected: self.dim,
                got: h.dim(),
            });
        }
        h.ensure_hermitian()?;
        Ok(h)
    }

    /// λ·H(t)
    pub fn scaled(&self, lambda: f64) -> Self {
        let inner = self.evaluator.clone();
        Self {
            evaluator: Arc::new(move |t| inner(t).scale(lambda)),
            ..self.clone()
        }
    }

    /// H(t) + shift·I
    pub fn shifted(&self, shift: f64) -> Self {
        let inner = self.evaluator.clone();
        let id = ComplexMatrix::identity(self.dim).scale(shift);
        Self {
            evaluator: Arc::new(move |t| &inner(t) + &id),
            ..self.clone()
        }
    }

    /// The same trajectory on [0, t_end].
    pub fn restricted(&self, t_end: f64) -> Result<Self> {
        check_duration(t_end)?;
        if t_end > self.duration * (1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "cannot extend a trajectory of duration {} to {t_end}",
                self.duration
            )));
        }
        Ok(Self {
            duration: t_end.min(self.duration),
            ..self.clone()
        })
    }

    /// Runs `self` on [0, T₁] followed by `next` on [T₁, T₁ + T₂].
    pub fn then(&self, next: &HamiltonianTrajectory) -> Result<Self> {
        if next.dim != self.dim {
            return Err(Error::DimensionError {
                expected: self.dim,
                got: next.dim,
            });
        }
        let (a, b) = (self.evaluator.clone(), next.evaluator.clone());
        let split = self.duration;
        let second = next.duration;
        let smoothness = if self.smoothness == Smoothness::PiecewiseConstant
            && next.smoothness == Smoothness::PiecewiseConstant
        {
            Smoothness::PiecewiseConstant
        } else {
            Smoothness::Smooth
        };
        Ok(Self {
            dim: self.dim,
            duration: split + second,
            smoothness,
            evaluator: Arc::new(move |t| {
                if t < split {
                    a(t)
                } else {
                    b((t - split).min(second))
                }
            }),
        })
    }

    /// Minimum instantaneous eigenvalue over `samples + 1` evenly spaced times.
    pub fn min_instantaneous_eigenvalue(&self, samples: usize) -> Result<f64> {
        let n = samples.max(1);
        let mut lowest = f64::INFINITY;
        for k in 0..=n {
            let h = self.checked(self.duration * k as f64 / n as f64)?;
            lowest = lowest.min(min_eigenvalue(&h)?);
        }
        Ok(lowest)
    }

    /// Shifts the trajectory by a multiple of the identity so that the lowest
    /// sampled instantaneous eigenvalue becomes zero.
    pub fn shift_ground_to_zero(&self, samples: usize) -> Result<Self> {
        let lowest = self.min_instantaneous_eigenvalue(samples)?;
        Ok(self.shifted(-lowest))
    }
}
