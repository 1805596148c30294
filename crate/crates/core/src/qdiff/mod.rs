//! q-difference polynomials, truncated Puiseux series and the substitution
//! `P(x, s(x), s(qx), …, s(qⁿx))` used to verify solutions.

mod multi_index;
mod poly;
mod series;

use std::collections::BTreeMap;

use num_traits::Zero;

pub use multi_index::MultiIndex;
pub use poly::{QDiffPolynomial, TermKey};
pub use series::PuiseuxSeries;

pub(crate) use series::{fmt_product, join_signed_terms, min_bound};

use crate::field::rational::Rational;
use crate::field::Coefficient;

/// Largest exponent `T` such that every term of `P(s)` with exponent `≤ T`
/// is determined by the known terms of `s`.
///
/// A product of `k` factors `s + δ` with `val(δ) > t` differs from the product
/// of the `s` factors by terms of valuation `> t + (k−1)·min(val s, t)`.
pub fn validity_bound<C: Coefficient>(
    p: &QDiffPolynomial<C>,
    s: &PuiseuxSeries<C>,
) -> Option<Rational> {
    let t = s.trunc()?;
    let v = s.valuation().map_or(t, |v| v.min(t));
    p.terms()
        .filter(|(k, _)| k.height() > 0)
        .map(|(k, _)| &k.xexp + t + v * Rational::from_integer((k.height() - 1).into()))
        .min()
}

/// `P(x, s, σs, …, σⁿs)`, truncated at its validity bound.
pub fn substitute_series<C: Coefficient>(
    p: &QDiffPolynomial<C>,
    s: &PuiseuxSeries<C>,
    ctx: &C::Context,
) -> PuiseuxSeries<C> {
    substitute_series_upto(p, s, ctx, None)
}

/// As [`substitute_series`], additionally discarding exponents above `limit`.
/// With an exact `s` and no limit the result is the exact value of `P(s)`.
pub fn substitute_series_upto<C: Coefficient>(
    p: &QDiffPolynomial<C>,
    s: &PuiseuxSeries<C>,
    ctx: &C::Context,
    limit: Option<&Rational>,
) -> PuiseuxSeries<C> {
    let bound = min_bound(validity_bound(p, s).as_ref(), limit);
    let min_alpha = p.min_xexp().cloned().unwrap_or_else(Rational::zero);
    let max_deg = p.degree();
    // valuation floor of every factor, only negative values loosen the caps
    let neg_val = s
        .valuation()
        .map_or_else(Rational::zero, |v| v.min(&Rational::zero()).clone());
    let cap_for = |alpha: &Rational, remaining: u32| {
        bound
            .as_ref()
            .map(|b| b - alpha - &neg_val * Rational::from_integer(remaining.into()))
    };

    // powers[j][k] = (σʲs)^k, capped for the most permissive use
    let mut powers: Vec<Vec<PuiseuxSeries<C>>> = Vec::new();
    for j in 0..=p.order() {
        let max_k = p.terms().map(|(k, _)| k.mi.get(j)).max().unwrap_or(0);
        let shifted = s.apply_shift(j, ctx);
        let mut pw = vec![PuiseuxSeries::monomial(C::one(), Rational::zero(), None)];
        for k in 1..=max_k {
            let cap = cap_for(&min_alpha, max_deg - k);
            let next = pw[k as usize - 1].mul_capped(&shifted, cap.as_ref());
            pw.push(next);
        }
        powers.push(pw);
    }

    let mut acc: BTreeMap<Rational, C> = BTreeMap::new();
    for (key, a) in p.terms() {
        let mut remaining = key.height();
        let mut prod = PuiseuxSeries::monomial(a.clone(), key.xexp.clone(), None);
        for (j, &t) in key.mi.entries().iter().enumerate() {
            if t == 0 {
                continue;
            }
            remaining -= t;
            let cap = cap_for(&Rational::zero(), remaining);
            prod = prod.mul_capped(&powers[j][t as usize], cap.as_ref());
        }
        for (e, c) in prod.terms() {
            if bound.as_ref().is_some_and(|b| e > b) {
                continue;
            }
            match acc.get_mut(e) {
                Some(v) => *v = v.add(c),
                None => {
                    acc.insert(e.clone(), c.clone());
                }
            }
        }
    }
    PuiseuxSeries::new(acc, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rational::{int, rat};
    use crate::field::KScalar;

    type P = QDiffPolynomial<KScalar>;

    fn y(j: usize) -> P {
        P::shifted_y(j)
    }

    fn x(e: i64) -> P {
        P::x_monomial(KScalar::one(), int(e))
    }

    #[test]
    fn linear_first_order_solution_has_zero_residual() {
        let p = y(1).sub(&y(0)).sub(&x(1));
        let c = (&KScalar::q() - &KScalar::one()).inv().unwrap();
        let s = PuiseuxSeries::monomial(c, int(1), Some(int(10)));
        let r = substitute_series(&p, &s, &());
        assert!(r.is_zero());
        assert_eq!(r.trunc(), Some(&int(10)));
    }

    #[test]
    fn ramified_solution_has_zero_residual() {
        let p = y(0).mul(&y(1)).sub(&x(1));
        let s = PuiseuxSeries::monomial(KScalar::qpow(&rat(-1, 4)), rat(1, 2), Some(int(5)));
        let r = substitute_series(&p, &s, &());
        assert!(r.is_zero());
        assert_eq!(r.trunc(), Some(&rat(11, 2)));
    }

    #[test]
    fn direct_expansion() {
        let p = y(0).sub(&x(1));
        let s = PuiseuxSeries::monomial(KScalar::one(), int(2), None);
        let r = substitute_series(&p, &s, &());
        assert_eq!(r.valuation(), Some(&int(1)));
        assert_eq!(r.terms().len(), 2);
        assert_eq!(r.to_string(), "-x + x^2");
    }

    #[test]
    fn validity_accounts_for_degree() {
        // y^3 with s = x + o(x^4): product errors start above 4 + 2·1
        let p = y(0).mul(&y(0)).mul(&y(0));
        let s = PuiseuxSeries::monomial(KScalar::one(), int(1), Some(int(4)));
        assert_eq!(validity_bound(&p, &s), Some(int(6)));
        let r = substitute_series(&p, &s, &());
        assert_eq!(r.to_string(), "x^3 + o(x^6)");
    }
}
