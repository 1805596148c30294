//! Floating-point coefficients with `q` specialized to a complex number.

use std::fmt;

use num_complex::Complex64;

use super::rational::{to_f64, Rational};
use super::FieldError;

/// Relative threshold below which a value is treated as cancelled.
pub const CANCELLATION_TOL: f64 = 1e-10;

/// A complex value together with the magnitude of the quantities it was
/// computed from; `is_zero` compares against that magnitude so that
/// cancellation residue is recognized as zero.
#[derive(Clone, Copy, Debug)]
pub struct Approx {
    pub value: Complex64,
    pub scale: f64,
}

impl Approx {
    pub fn new(value: Complex64) -> Self {
        Self {
            value,
            scale: value.norm(),
        }
    }

    pub fn zero() -> Self {
        Self::new(Complex64::new(0.0, 0.0))
    }

    pub fn one() -> Self {
        Self::new(Complex64::new(1.0, 0.0))
    }

    pub fn from_rational(r: &Rational) -> Self {
        Self::new(Complex64::new(to_f64(r), 0.0))
    }

    /// `q^e` on the principal branch.
    pub fn qpow(q: Complex64, e: &Rational) -> Self {
        Self::new((q.ln() * to_f64(e)).exp())
    }

    pub fn is_zero(&self) -> bool {
        let n = self.value.norm();
        n == 0.0 || n <= CANCELLATION_TOL * self.scale
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let value = self.value + rhs.value;
        Self {
            value,
            scale: self.scale.max(rhs.scale).max(value.norm()),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            value: self.value * rhs.value,
            scale: self.scale * rhs.scale,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            value: -self.value,
            scale: self.scale,
        }
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let n = self.value.norm();
        Ok(Self {
            value: self.value.inv(),
            scale: (self.scale / (n * n)).max(1.0 / n),
        })
    }
}

impl PartialEq for Approx {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl fmt::Display for Approx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i", self.value.re, self.value.im)
    }
}
