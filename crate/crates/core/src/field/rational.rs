//! Helpers around arbitrary-precision rationals used for exponents and
//! scalar coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Least common multiple of the denominators of `values` (1 for an empty input).
pub fn denominator_lcm<'a, I>(values: I) -> BigInt
where
    I: IntoIterator<Item = &'a Rational>,
{
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Natural log of |n|, valid far beyond the f64 range of `n` itself.
pub fn ln_abs_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().unwrap_or(f64::INFINITY).ln() + (shift as f64) * std::f64::consts::LN_2
}

pub fn ln_abs_rational(r: &Rational) -> f64 {
    ln_abs_bigint(r.numer()) - ln_abs_bigint(r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * ln_abs_rational(r).exp()
}

/// Exact `m`-th root of a nonnegative rational, when it exists.
pub fn exact_root(r: &Rational, m: u32) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    if r.is_zero() {
        return Some(Rational::zero());
    }
    let num = exact_int_root(r.numer(), m)?;
    let den = exact_int_root(r.denom(), m)?;
    Some(Rational::new(num, den))
}

fn exact_int_root(n: &BigInt, m: u32) -> Option<BigInt> {
    let root = n.nth_root(m);
    if num_traits::pow(root.clone(), m as usize) == *n {
        Some(root)
    } else {
        None
    }
}

/// Parse `a`, `-a` or `a/b` into a rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Exponent as it appears after `^`: bare for nonnegative integers,
/// parenthesized otherwise.
pub fn fmt_exponent(e: &Rational) -> String {
    if e.is_integer() && !e.is_negative() {
        e.to_string()
    } else {
        format!("({})", e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lcm_of_denominators() {
        let v = [rat(1, 2), rat(2, 3), int(5)];
        assert_eq!(denominator_lcm(v.iter()), BigInt::from(6));
        assert_eq!(denominator_lcm(std::iter::empty()), BigInt::one());
    }

    #[test]
    fn log_of_huge_integers() {
        let big = num_traits::pow(BigInt::from(2), 5000);
        let got = ln_abs_bigint(&big);
        assert!((got - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn exact_roots() {
        assert_eq!(exact_root(&rat(4, 9), 2), Some(rat(2, 3)));
        assert_eq!(exact_root(&rat(2, 1), 2), None);
        assert_eq!(exact_root(&rat(-8, 1), 3), None);
        assert_eq!(exact_root(&rat(27, 8), 3), Some(rat(3, 2)));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("-3/6"), Some(rat(-1, 2)));
        assert_eq!(parse_rational("7"), Some(int(7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(fmt_exponent(&int(2)), "2");
        assert_eq!(fmt_exponent(&rat(3, 2)), "(3/2)");
        assert_eq!(fmt_exponent(&int(-1)), "(-1)");
    }
}
