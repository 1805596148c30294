//! Finite sums `Σ rᵢ·q^{eᵢ}` with rational coefficients and rational exponents.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use super::rational::{denominator_lcm, fmt_exponent, ln_abs_rational, to_f64, Rational};

/// Sparse Laurent-Puiseux polynomial in `q`, terms sorted by strictly
/// increasing exponent and free of zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QMonomialSum {
    terms: Vec<(Rational, Rational)>,
}

impl QMonomialSum {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, Rational::zero())
    }

    pub fn monomial(coeff: Rational, qexp: Rational) -> Self {
        if coeff.is_zero() {
            Self::zero()
        } else {
            Self {
                terms: vec![(qexp, coeff)],
            }
        }
    }

    /// Collects `(qexp, coeff)` pairs, merging equal exponents.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let mut acc: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (e, c) in terms {
            *acc.entry(e).or_insert_with(Rational::zero) += c;
        }
        Self {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// `(qexp, coeff)` pairs in increasing exponent order.
    pub fn terms(&self) -> &[(Rational, Rational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_zero() && self.terms[0].1.is_one()
    }

    pub fn as_monomial(&self) -> Option<(&Rational, &Rational)> {
        match self.terms.as_slice() {
            [(e, c)] => Some((c, e)),
            _ => None,
        }
    }

    /// The rational value when the sum has no `q` dependence.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(e, c)] if e.is_zero() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn lowest(&self) -> Option<(&Rational, &Rational)> {
        self.terms.first().map(|(e, c)| (e, c))
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ea, ca) = &self.terms[i];
            let (eb, cb) = &other.terms[j];
            match ea.cmp(eb) {
                std::cmp::Ordering::Less => {
                    out.push((ea.clone(), ca.clone()));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((eb.clone(), cb.clone()));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = ca + cb;
                    if !c.is_zero() {
                        out.push((ea.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Self { terms: out }
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if let Some((c, e)) = other.as_monomial() {
            return self.mul_monomial(c, e);
        }
        if let Some((c, e)) = self.as_monomial() {
            return other.mul_monomial(c, e);
        }
        Self::from_terms(
            self.terms
                .iter()
                .flat_map(|(ea, ca)| other.terms.iter().map(move |(eb, cb)| (ea + eb, ca * cb))),
        )
    }

    pub fn mul_monomial(&self, coeff: &Rational, qexp: &Rational) -> Self {
        if coeff.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e + qexp, c * coeff))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Value at a complex `q`, principal branch for fractional powers.
    pub fn eval(&self, q: Complex64) -> Complex64 {
        let log_q = q.ln();
        self.terms
            .iter()
            .map(|(e, c)| (log_q * to_f64(e)).exp() * to_f64(c))
            .sum()
    }

    /// Sum of the moduli of the evaluated terms; the scale against which
    /// cancellation in [`eval`](Self::eval) is judged.
    pub fn eval_scale(&self, q: Complex64) -> f64 {
        let ln_abs_q = q.norm().ln();
        self.terms
            .iter()
            .map(|(e, c)| (ln_abs_rational(c) + to_f64(e) * ln_abs_q).exp())
            .sum()
    }

    /// `ln |self(q)|` computed with a log-sum-exp so that huge exponents do
    /// not overflow. Returns `None` when the value vanishes at `q`.
    pub fn log_abs_at(&self, q: Complex64) -> Option<f64> {
        if self.terms.is_empty() {
            return None;
        }
        let ln_abs_q = q.norm().ln();
        let arg_q = q.arg();
        let parts: Vec<(f64, f64)> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let ef = to_f64(e);
                let phase = ef * arg_q
                    + if c.is_negative() {
                        std::f64::consts::PI
                    } else {
                        0.0
                    };
                (ln_abs_rational(c) + ef * ln_abs_q, phase)
            })
            .collect();
        let max = parts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let rest: Complex64 = parts
            .iter()
            .map(|&(m, ph)| Complex64::from_polar((m - max).exp(), ph))
            .sum();
        let n = rest.norm();
        if n <= 1e-12 {
            None
        } else {
            Some(max + n.ln())
        }
    }

    /// Least common multiple of the exponent denominators.
    pub(crate) fn exponent_lcm(&self) -> BigInt {
        denominator_lcm(self.terms.iter().map(|(e, _)| e))
    }

    /// Dense coefficients in `t = q^{1/scale}` after dividing out the lowest
    /// power. Returns `(lowest qexp, coefficients)`.
    pub(crate) fn to_dense(&self, scale: &BigInt) -> (Rational, Vec<Rational>) {
        let low = self.terms[0].0.clone();
        let scale_r = Rational::from_integer(scale.clone());
        let top = ((&self.terms[self.terms.len() - 1].0 - &low) * &scale_r).to_integer();
        let len = usize::try_from(top).expect("dense degree fits usize") + 1;
        let mut dense = vec![Rational::zero(); len];
        for (e, c) in &self.terms {
            let k = ((e - &low) * &scale_r).to_integer();
            dense[usize::try_from(k).expect("dense index")] = c.clone();
        }
        (low, dense)
    }

    pub(crate) fn from_dense(low: &Rational, dense: &[Rational], scale: &BigInt) -> Self {
        let scale_r = Rational::from_integer(scale.clone());
        Self {
            terms: dense
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| {
                    (
                        low + Rational::from_integer(BigInt::from(k)) / &scale_r,
                        c.clone(),
                    )
                })
                .collect(),
        }
    }

    /// Dense span `(highest - lowest)·scale`, used to bound gcd work.
    pub(crate) fn dense_span(&self, scale: &BigInt) -> Option<usize> {
        let (lo, hi) = (self.terms.first()?, self.terms.last()?);
        let span = ((&hi.0 - &lo.0) * Rational::from_integer(scale.clone())).to_integer();
        usize::try_from(span).ok()
    }

    /// Whether the sum needs parentheses inside a product.
    pub(crate) fn needs_parens(&self) -> bool {
        self.terms.len() > 1
    }
}

fn fmt_term(f: &mut String, qexp: &Rational, coeff: &Rational) {
    if qexp.is_zero() {
        f.push_str(&coeff.to_string());
        return;
    }
    if coeff.is_one() {
    } else if *coeff == -Rational::one() {
        f.push('-');
    } else {
        f.push_str(&coeff.to_string());
        f.push('*');
    }
    if qexp.is_one() {
        f.push('q');
    } else {
        f.push_str("q^");
        f.push_str(&fmt_exponent(qexp));
    }
}

impl fmt::Display for QMonomialSum {
    /// Highest power first, e.g. `2*q^(3/2) - 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let mut t = String::new();
            fmt_term(&mut t, e, c);
            if i == 0 {
                out.push_str(&t);
            } else if let Some(rest) = t.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&t);
            }
        }
        f.write_str(&out)
    }
}

// Dense univariate polynomials over Q, coefficient index = degree.

pub(crate) fn dense_trim(p: &mut Vec<Rational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub(crate) fn dense_divrem(num: &[Rational], den: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut rem = num.to_vec();
    dense_trim(&mut rem);
    let dd = den.len() - 1;
    let lead = &den[dd];
    if rem.len() < den.len() {
        return (Vec::new(), rem);
    }
    let mut quot = vec![Rational::zero(); rem.len() - dd];
    while rem.len() >= den.len() {
        let shift = rem.len() - den.len();
        let factor = &rem[rem.len() - 1] / lead;
        for (i, d) in den.iter().enumerate() {
            rem[shift + i] -= &factor * d;
        }
        quot[shift] = factor;
        rem.pop();
        dense_trim(&mut rem);
    }
    (quot, rem)
}

pub(crate) fn dense_gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    dense_trim(&mut x);
    dense_trim(&mut y);
    while !y.is_empty() {
        let (_, mut r) = dense_divrem(&x, &y);
        if let Some(lead) = r.last().cloned() {
            for c in r.iter_mut() {
                *c /= &lead;
            }
        }
        x = y;
        y = r;
    }
    if let Some(lead) = x.last().cloned() {
        for c in x.iter_mut() {
            *c /= &lead;
        }
    }
    x
}

const MODULUS: u64 = (1 << 61) - 1;

fn mod_reduce(n: &BigInt) -> u64 {
    let m = BigInt::from(MODULUS);
    let r = ((n % &m) + &m) % &m;
    u64::try_from(r).expect("residue fits u64")
}

fn mod_mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODULUS as u128) as u64
}

fn mod_inv(a: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a, MODULUS - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = mod_mul(acc, base);
        }
        base = mod_mul(base, base);
        e >>= 1;
    }
    acc
}

fn to_mod(p: &[Rational]) -> Option<Vec<u64>> {
    p.iter()
        .map(|c| {
            let d = mod_reduce(c.denom());
            (d != 0).then(|| mod_mul(mod_reduce(c.numer()), mod_inv(d)))
        })
        .collect()
}

/// `true` only when `a` and `b` are certainly coprime, judged by their images
/// modulo a large prime. `false` means undecided.
pub(crate) fn dense_coprime_mod_p(a: &[Rational], b: &[Rational]) -> bool {
    let (Some(mut x), Some(mut y)) = (to_mod(a), to_mod(b)) else {
        return false;
    };
    if x.last().is_none_or(|&c| c == 0) || y.last().is_none_or(|&c| c == 0) {
        return false;
    }
    let trim = |p: &mut Vec<u64>| {
        while p.last() == Some(&0) {
            p.pop();
        }
    };
    while !y.is_empty() {
        let inv = mod_inv(y[y.len() - 1]);
        while x.len() >= y.len() {
            let shift = x.len() - y.len();
            let f = mod_mul(x[x.len() - 1], inv);
            for (i, &c) in y.iter().enumerate() {
                x[shift + i] = (x[shift + i] + MODULUS - mod_mul(f, c)) % MODULUS;
            }
            trim(&mut x);
        }
        std::mem::swap(&mut x, &mut y);
    }
    x.len() == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rational::{int, rat};

    fn q() -> QMonomialSum {
        QMonomialSum::monomial(int(1), int(1))
    }

    #[test]
    fn add_cancels_and_sorts() {
        let a = q().add(&QMonomialSum::one());
        let b = a.add(&QMonomialSum::constant(int(-1)));
        assert_eq!(b, q());
        assert_eq!(a.terms()[0].0, int(0));
    }

    #[test]
    fn multiplication_adds_exponents() {
        let h = QMonomialSum::monomial(int(1), rat(1, 2));
        assert_eq!(h.mul(&h), q());
        let a = q().sub(&QMonomialSum::one());
        let b = q().add(&QMonomialSum::one());
        assert_eq!(a.mul(&b), q().pow(2).sub(&QMonomialSum::one()));
    }

    #[test]
    fn display_orders_descending() {
        let s = QMonomialSum::from_terms(vec![(rat(3, 2), int(2)), (int(0), int(-1))]);
        assert_eq!(s.to_string(), "2*q^(3/2) - 1");
        let t = QMonomialSum::from_terms(vec![(int(-1), rat(-3, 2)), (int(2), int(1))]);
        assert_eq!(t.to_string(), "q^2 - 3/2*q^(-1)");
        assert_eq!(QMonomialSum::zero().to_string(), "0");
    }

    #[test]
    fn log_abs_handles_overflowing_values() {
        let big = QMonomialSum::monomial(int(3), int(5000));
        let got = big.log_abs_at(Complex64::new(2.0, 0.0)).unwrap();
        let want = 3f64.ln() + 5000.0 * 2f64.ln();
        assert!((got - want).abs() < 1e-9);
        let vanishing = q().sub(&QMonomialSum::one());
        assert_eq!(vanishing.log_abs_at(Complex64::new(1.0, 0.0)), None);
    }

    #[test]
    fn dense_gcd_finds_common_factor() {
        // (t-1)(t+2) and (t-1)(t+3)
        let a = vec![int(-2), int(1), int(1)];
        let b = vec![int(-3), int(2), int(1)];
        assert_eq!(dense_gcd(&a, &b), vec![int(-1), int(1)]);
        assert!(!dense_coprime_mod_p(&a, &b));
        let c = vec![int(-3), int(1)];
        assert!(dense_coprime_mod_p(&a, &c));
    }
}
