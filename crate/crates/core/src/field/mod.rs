//! Coefficient arithmetic.
//!
//! Exact computations use [`KScalar`], the field generated over `Q` by a
//! formal `q` raised to rational powers. Numeric computations use [`Approx`],
//! complex numbers with `q` fixed to a value. Everything above this module is
//! generic over the [`Coefficient`] trait.

mod approx;
mod kscalar;
mod qsum;
pub mod rational;

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

pub use approx::{Approx, CANCELLATION_TOL};
pub use kscalar::KScalar;
pub use qsum::QMonomialSum;
pub use rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator vanishes at the given q")]
    EvalDenominatorZero,
    #[error("value vanishes at the given q")]
    VanishesAtQ,
}

/// Field operations shared by the exact and numeric coefficient domains.
pub trait Coefficient: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    /// Data needed to build `q^e` (nothing for the formal field, the value of
    /// `q` for the numeric one).
    type Context: Clone + fmt::Debug + Send + Sync;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn qpow(ctx: &Self::Context, e: &Rational) -> Self;

    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self, FieldError>;

    fn div(&self, rhs: &Self) -> Result<Self, FieldError> {
        Ok(self.mul(&rhs.inv()?))
    }

    fn is_one(&self) -> bool {
        self.sub(&Self::one()).is_zero()
    }

    fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Numeric value, with `q` taken from `q` when the coefficient is formal.
    fn to_complex(&self, q: Complex64) -> Result<Complex64, FieldError>;

    /// `ln |value|`, overflow-safe.
    fn log_abs_at(&self, q: Complex64) -> Result<f64, FieldError>;

    /// Text safe to use as a factor of a product.
    fn fmt_factor(&self) -> String {
        format!("({})", self)
    }

    /// Total order used to enumerate roots reproducibly.
    fn canonical_cmp(&self, other: &Self) -> Ordering;
}

impl Coefficient for KScalar {
    type Context = ();

    fn zero() -> Self {
        KScalar::zero()
    }

    fn one() -> Self {
        KScalar::one()
    }

    fn from_rational(r: &Rational) -> Self {
        KScalar::from_rational(r.clone())
    }

    fn qpow(_: &(), e: &Rational) -> Self {
        KScalar::qpow(e)
    }

    fn is_zero(&self) -> bool {
        KScalar::is_zero(self)
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    fn inv(&self) -> Result<Self, FieldError> {
        KScalar::inv(self)
    }

    fn is_one(&self) -> bool {
        KScalar::is_one(self)
    }

    fn to_complex(&self, q: Complex64) -> Result<Complex64, FieldError> {
        self.eval_at_q(q)
    }

    fn log_abs_at(&self, q: Complex64) -> Result<f64, FieldError> {
        KScalar::log_abs_at(self, q)
    }

    fn fmt_factor(&self) -> String {
        KScalar::fmt_factor(self)
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.to_string().cmp(&other.to_string())
    }
}

impl Coefficient for Approx {
    type Context = Complex64;

    fn zero() -> Self {
        Approx::zero()
    }

    fn one() -> Self {
        Approx::one()
    }

    fn from_rational(r: &Rational) -> Self {
        Approx::from_rational(r)
    }

    fn qpow(q: &Complex64, e: &Rational) -> Self {
        Approx::qpow(*q, e)
    }

    fn is_zero(&self) -> bool {
        Approx::is_zero(self)
    }

    fn add(&self, rhs: &Self) -> Self {
        Approx::add(self, rhs)
    }

    fn sub(&self, rhs: &Self) -> Self {
        Approx::sub(self, rhs)
    }

    fn mul(&self, rhs: &Self) -> Self {
        Approx::mul(self, rhs)
    }

    fn neg(&self) -> Self {
        Approx::neg(self)
    }

    fn inv(&self) -> Result<Self, FieldError> {
        Approx::inv(self)
    }

    fn to_complex(&self, _q: Complex64) -> Result<Complex64, FieldError> {
        Ok(self.value)
    }

    fn log_abs_at(&self, _q: Complex64) -> Result<f64, FieldError> {
        if self.is_zero() {
            Err(FieldError::VanishesAtQ)
        } else {
            Ok(self.value.norm().ln())
        }
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.value
            .re
            .total_cmp(&other.value.re)
            .then(self.value.im.total_cmp(&other.value.im))
    }
}
