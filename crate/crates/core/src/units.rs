//! Unit handling. Internally ℏ = 1, so an energy is stored as the angular
//! frequency E/ℏ in rad/s.

use std::fmt;
use std::ops::{Add, Mul, Sub};

/// Reduced Planck constant in J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;

/// An energy, stored in natural units (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Energy(f64);

impl Energy {
    pub const ZERO: Energy = Energy(0.0);

    pub fn from_angular_frequency(omega: f64) -> Self {
        Energy(omega)
    }

    pub fn from_joules(joules: f64) -> Self {
        Energy(joules / HBAR)
    }

    /// Energy of a drive with cyclic frequency `hz` (E = ℏ·2π·f).
    pub fn from_hertz(hz: f64) -> Self {
        Energy(2.0 * std::f64::consts::PI * hz)
    }

    pub fn angular_frequency(self) -> f64 {
        self.0
    }

    pub fn joules(self) -> f64 {
        self.0 * HBAR
    }

    pub fn abs(self) -> Self {
        Energy(self.0.abs())
    }
}

impl Add for Energy {
    type Output = Energy;
    fn add(self, rhs: Energy) -> Energy {
        Energy(self.0 + rhs.0)
    }
}

impl Sub for Energy {
    type Output = Energy;
    fn sub(self, rhs: Energy) -> Energy {
        Energy(self.0 - rhs.0)
    }
}

impl Mul<f64> for Energy {
    type Output = Energy;
    fn mul(self, rhs: f64) -> Energy {
        Energy(self.0 * rhs)
    }
}

impl fmt::Display for Energy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.3e} J", self.joules())
    }
}
