//! Exact scalars: fractions of [`QMonomialSum`]s.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::qsum::{dense_coprime_mod_p, dense_divrem, dense_gcd, QMonomialSum};
use super::rational::Rational;
use super::FieldError;

/// Dense degree above which fraction reduction skips the polynomial gcd and
/// only removes the common `q`-monomial unit.
const GCD_DENSE_LIMIT: usize = 4096;

/// Element of the field of fractions of `Q[q^Q]`.
///
/// The denominator is normalized so that its lowest exponent is `0` and its
/// highest-exponent coefficient is `1` (so `1/(q - 1)` rather than
/// `-1/(1 - q)`), and numerator and denominator are reduced by their polynomial gcd whenever
/// the dense size stays below `GCD_DENSE_LIMIT`.
#[derive(Clone, Debug)]
pub struct KScalar {
    num: QMonomialSum,
    den: QMonomialSum,
}

impl KScalar {
    pub fn zero() -> Self {
        Self {
            num: QMonomialSum::zero(),
            den: QMonomialSum::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::from_qsum(QMonomialSum::constant(r))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(n.into()))
    }

    pub fn from_qsum(num: QMonomialSum) -> Self {
        Self {
            num,
            den: QMonomialSum::one(),
        }
    }

    /// The formal symbol `q`.
    pub fn q() -> Self {
        Self::qpow(&Rational::one())
    }

    /// The pure monomial `q^e`.
    pub fn qpow(e: &Rational) -> Self {
        Self::monomial(Rational::one(), e.clone())
    }

    pub fn monomial(coeff: Rational, qexp: Rational) -> Self {
        Self::from_qsum(QMonomialSum::monomial(coeff, qexp))
    }

    pub fn new(num: QMonomialSum, den: QMonomialSum) -> Result<Self, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: QMonomialSum, den: QMonomialSum) -> Self {
        let (num, den) = reduce_common_factor(num, den);
        Self::normalized_coprime(num, den)
    }

    /// Like `normalized`, for callers that already removed the common factor.
    fn normalized_coprime(num: QMonomialSum, den: QMonomialSum) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.is_one() {
            return Self { num, den };
        }
        if let Some((c, e)) = den.as_monomial() {
            let (c, e) = (c.recip(), -e);
            return Self {
                num: num.mul_monomial(&c, &e),
                den: QMonomialSum::one(),
            };
        }
        let (e, _) = den.lowest().expect("nonzero denominator");
        let (_, lead) = den.terms().last().expect("nonzero denominator");
        let (c, e) = (lead.recip(), -e);
        Self {
            num: num.mul_monomial(&c, &e),
            den: den.mul_monomial(&c, &e),
        }
    }

    pub fn numerator(&self) -> &QMonomialSum {
        &self.num
    }

    pub fn denominator(&self) -> &QMonomialSum {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    /// `(coeff, qexp)` when the scalar is a single term `coeff·q^qexp`.
    pub fn as_monomial(&self) -> Option<(Rational, Rational)> {
        if !self.den.is_one() {
            return None;
        }
        self.num.as_monomial().map(|(c, e)| (c.clone(), e.clone()))
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if !self.den.is_one() {
            return None;
        }
        self.num.as_constant()
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, FieldError> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, n: i32) -> Result<Self, FieldError> {
        let mut base = if n < 0 { self.inv()? } else { self.clone() };
        let mut k = n.unsigned_abs();
        if let Some((c, e)) = base.as_monomial() {
            let c = num_traits::Pow::pow(&c, k);
            return Ok(Self::monomial(c, e * Rational::from_integer(k.into())));
        }
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// Number of monomials in numerator and denominator.
    pub fn size(&self) -> usize {
        self.num.len() + self.den.len()
    }

    /// Numeric value at `q` (principal branch for fractional powers).
    pub fn eval_at_q(&self, q: Complex64) -> Result<Complex64, FieldError> {
        if q.norm() == 0.0 {
            return Err(FieldError::EvalDenominatorZero);
        }
        let den = self.den.eval(q);
        if den.norm() <= 1e-12 * self.den.eval_scale(q).max(1.0) {
            return Err(FieldError::EvalDenominatorZero);
        }
        Ok(self.num.eval(q) / den)
    }

    /// `ln |self(q)|`, robust against overflow of `|self(q)|` itself.
    pub fn log_abs_at(&self, q: Complex64) -> Result<f64, FieldError> {
        let den = self
            .den
            .log_abs_at(q)
            .ok_or(FieldError::EvalDenominatorZero)?;
        let num = self.num.log_abs_at(q).ok_or(FieldError::VanishesAtQ)?;
        Ok(num - den)
    }

    /// Text usable as a factor of a product: single terms bare, sums and
    /// fractions parenthesized.
    pub fn fmt_factor(&self) -> String {
        if self.den.is_one() && !self.num.needs_parens() {
            self.num.to_string()
        } else {
            format!("({})", self)
        }
    }
}

/// Divides numerator and denominator by their gcd in `Q[t]`, `t = q^{1/L}`.
fn reduce_common_factor(num: QMonomialSum, den: QMonomialSum) -> (QMonomialSum, QMonomialSum) {
    match common_factor(&num, &den) {
        Some(g) => (exact_quotient(&num, &g), exact_quotient(&den, &g)),
        None => (num, den),
    }
}

/// Monic gcd of `a` and `b` in `Q[t]`, or `None` when it is a unit or the
/// dense size exceeds `GCD_DENSE_LIMIT`.
fn common_factor(a: &QMonomialSum, b: &QMonomialSum) -> Option<QMonomialSum> {
    if a.len() < 2 || b.len() < 2 {
        return None;
    }
    let scale = a.exponent_lcm().lcm(&b.exponent_lcm());
    let small = |s: &QMonomialSum| s.dense_span(&scale).is_some_and(|n| n <= GCD_DENSE_LIMIT);
    if !small(a) || !small(b) {
        return None;
    }
    let (da, db) = (a.to_dense(&scale).1, b.to_dense(&scale).1);
    if dense_coprime_mod_p(&da, &db) {
        return None;
    }
    let (short, long) = if da.len() <= db.len() { (&da, &db) } else { (&db, &da) };
    let g = if dense_divrem(long, short).1.is_empty() {
        let lead = short[short.len() - 1].clone();
        short.iter().map(|c| c / &lead).collect()
    } else {
        dense_gcd(&da, &db)
    };
    (g.len() > 1).then(|| QMonomialSum::from_dense(&Rational::zero(), &g, &scale))
}

/// `a / g` for a divisor `g` of `a`.
fn exact_quotient(a: &QMonomialSum, g: &QMonomialSum) -> QMonomialSum {
    let scale = a.exponent_lcm().lcm(&g.exponent_lcm());
    let (alow, ad) = a.to_dense(&scale);
    let (glow, gd) = g.to_dense(&scale);
    let (quot, _) = dense_divrem(&ad, &gd);
    QMonomialSum::from_dense(&(alow - glow), &quot, &scale)
}

impl PartialEq for KScalar {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for KScalar {}

impl Default for KScalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<Rational> for KScalar {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

impl<'a> Add<&'a KScalar> for &'a KScalar {
    type Output = KScalar;

    fn add(self, rhs: &KScalar) -> KScalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return KScalar::normalized(self.num.add(&rhs.num), self.den.clone());
        }
        let Some(g) = common_factor(&self.den, &rhs.den) else {
            return KScalar::normalized_coprime(
                self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
                self.den.mul(&rhs.den),
            );
        };
        let (b, d) = (exact_quotient(&self.den, &g), exact_quotient(&rhs.den, &g));
        let num = self.num.mul(&d).add(&rhs.num.mul(&b));
        let den = self.den.mul(&d);
        match common_factor(&num, &g) {
            Some(h) => KScalar::normalized_coprime(exact_quotient(&num, &h), exact_quotient(&den, &h)),
            None => KScalar::normalized_coprime(num, den),
        }
    }
}

impl<'a> Sub<&'a KScalar> for &'a KScalar {
    type Output = KScalar;

    fn sub(self, rhs: &KScalar) -> KScalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a KScalar> for &'a KScalar {
    type Output = KScalar;

    fn mul(self, rhs: &KScalar) -> KScalar {
        if self.is_zero() || rhs.is_zero() {
            return KScalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return KScalar::from_qsum(self.num.mul(&rhs.num));
        }
        let (a, d) = reduce_common_factor(self.num.clone(), rhs.den.clone());
        let (c, b) = reduce_common_factor(rhs.num.clone(), self.den.clone());
        KScalar::normalized_coprime(a.mul(&c), b.mul(&d))
    }
}

impl Neg for &KScalar {
    type Output = KScalar;

    fn neg(self) -> KScalar {
        KScalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for KScalar {
    /// E.g. `(2*q^(3/2) - 1)/(q - 1)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.needs_parens() {
            write!(f, "({})/({})", self.num, self.den)
        } else {
            write!(f, "{}/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rational::{int, rat};

    fn q() -> KScalar {
        KScalar::q()
    }

    fn c(n: i64) -> KScalar {
        KScalar::from_int(n)
    }

    #[test]
    fn add_examples() {
        assert_eq!(&(&q() + &c(1)) + &c(-1), q());
        assert_eq!(&KScalar::zero() + &q(), q());
        let a = (&q() - &c(1)).inv().unwrap();
        let b = (&c(1) - &q()).inv().unwrap();
        let s = &a + &b;
        assert!(s.is_zero());
        assert_eq!(s.to_string(), "0");
    }

    #[test]
    fn mul_and_inv_examples() {
        let h = KScalar::qpow(&rat(1, 2));
        assert_eq!(&h * &h, q());
        let inv = (&q() - &c(1)).inv().unwrap();
        assert_eq!(inv.to_string(), "1/(q - 1)");
        assert_eq!(inv.denominator().lowest(), Some((&int(0), &int(-1))));
        assert_eq!(inv.denominator().terms().last(), Some(&(int(1), int(1))));
        let x = &KScalar::monomial(int(2), rat(3, 2)) * &q().inv().unwrap();
        assert_eq!(x, KScalar::monomial(int(2), rat(1, 2)));
        assert_eq!(x.to_string(), "2*q^(1/2)");
        assert_eq!(KScalar::zero().inv(), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn normalization_makes_lowest_denominator_term_one() {
        // 1/(1-q) = -1/(q-1)
        let v = (&c(1) - &q()).inv().unwrap();
        assert_eq!(v.to_string(), "-1/(q - 1)");
        // q^2/(q^3 - q^2) reduces to 1/(q - 1)
        let n = KScalar::qpow(&int(2));
        let d = &KScalar::qpow(&int(3)) - &KScalar::qpow(&int(2));
        assert_eq!(n.div(&d).unwrap().to_string(), "1/(q - 1)");
    }

    #[test]
    fn gcd_reduction_cancels_polynomial_factors() {
        // (q^2 - 1)/(q - 1) = q + 1
        let n = &KScalar::qpow(&int(2)) - &c(1);
        let d = &q() - &c(1);
        assert_eq!(n.div(&d).unwrap(), &q() + &c(1));
        assert_eq!(n.div(&d).unwrap().to_string(), "q + 1");
    }

    #[test]
    fn qpow_examples() {
        assert!(KScalar::qpow(&int(0)).is_one());
        assert_eq!(KScalar::qpow(&int(-1)), q().inv().unwrap());
        assert_eq!(KScalar::qpow(&int(-1)).to_string(), "q^(-1)");
    }

    #[test]
    fn eval_examples() {
        let two = Complex64::new(2.0, 0.0);
        let v = (&q() - &c(1)).inv().unwrap().eval_at_q(two).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let r = KScalar::qpow(&rat(1, 2))
            .eval_at_q(Complex64::new(4.0, 0.0))
            .unwrap();
        assert!((r - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        let pole = q().div(&(&q() - &c(1))).unwrap();
        assert_eq!(
            pole.eval_at_q(Complex64::new(1.0, 0.0)),
            Err(FieldError::EvalDenominatorZero)
        );
    }
}
