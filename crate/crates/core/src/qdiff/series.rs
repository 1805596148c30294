use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::field::rational::{fmt_exponent, Rational};
use crate::field::Coefficient;

/// Truncated Puiseux series `Σ cᵢ·x^{eᵢ}` with strictly increasing rational
/// exponents.
///
/// `trunc = Some(t)` means the series is only known modulo terms of exponent
/// greater than `t`; `None` means the listed terms are the whole (finite)
/// series.
#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxSeries<C> {
    terms: Vec<(Rational, C)>,
    trunc: Option<Rational>,
}

impl<C: Coefficient> PuiseuxSeries<C> {
    pub fn new<I>(terms: I, trunc: Option<Rational>) -> Self
    where
        I: IntoIterator<Item = (Rational, C)>,
    {
        let mut acc: BTreeMap<Rational, C> = BTreeMap::new();
        for (e, c) in terms {
            if trunc.as_ref().is_some_and(|t| e > *t) {
                continue;
            }
            match acc.get_mut(&e) {
                Some(v) => *v = v.add(&c),
                None => {
                    acc.insert(e, c);
                }
            }
        }
        Self {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
            trunc,
        }
    }

    pub fn zero(trunc: Option<Rational>) -> Self {
        Self {
            terms: Vec::new(),
            trunc,
        }
    }

    pub fn monomial(coeff: C, exp: Rational, trunc: Option<Rational>) -> Self {
        Self::new([(exp, coeff)], trunc)
    }

    pub fn terms(&self) -> &[(Rational, C)] {
        &self.terms
    }

    pub fn trunc(&self) -> Option<&Rational> {
        self.trunc.as_ref()
    }

    pub fn with_trunc(&self, trunc: Option<Rational>) -> Self {
        Self::new(self.terms.iter().cloned(), trunc)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<&Rational> {
        self.terms.first().map(|(e, _)| e)
    }

    pub fn exponents(&self) -> impl Iterator<Item = &Rational> {
        self.terms.iter().map(|(e, _)| e)
    }

    pub fn coefficient(&self, exp: &Rational) -> Option<&C> {
        self.terms
            .binary_search_by(|(e, _)| e.cmp(exp))
            .ok()
            .map(|i| &self.terms[i].1)
    }

    /// Appends a term above every present exponent.
    ///
    /// # Panics
    /// If `exp` does not exceed the current last exponent.
    pub fn push(&mut self, exp: Rational, coeff: C) {
        if let Some((last, _)) = self.terms.last() {
            assert!(exp > *last, "series exponents must increase");
        }
        if !coeff.is_zero() {
            self.terms.push((exp, coeff));
        }
    }

    /// `σʲ`: each term `c·x^e` becomes `c·q^{j·e}·x^e`.
    pub fn apply_shift(&self, j: usize, ctx: &C::Context) -> Self {
        if j == 0 {
            return self.clone();
        }
        let jr = Rational::from_integer(j.into());
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.mul(&C::qpow(ctx, &(e * &jr)))))
                .collect(),
            trunc: self.trunc.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let trunc = min_bound(self.trunc.as_ref(), other.trunc.as_ref());
        Self::new(self.terms.iter().chain(other.terms.iter()).cloned(), trunc)
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(
            self.terms.iter().map(|(e, v)| (e.clone(), v.mul(c))),
            self.trunc.clone(),
        )
    }

    /// Product keeping only exponents `≤ cap`; the result's `trunc` is `cap`
    /// (no validity analysis: callers track it).
    pub(crate) fn mul_capped(&self, other: &Self, cap: Option<&Rational>) -> Self {
        let mut acc: BTreeMap<Rational, C> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea + eb;
                if cap.is_some_and(|t| e > *t) {
                    break;
                }
                let v = ca.mul(cb);
                match acc.get_mut(&e) {
                    Some(x) => *x = x.add(&v),
                    None => {
                        acc.insert(e, v);
                    }
                }
            }
        }
        Self {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
            trunc: cap.cloned(),
        }
    }

    /// Least common multiple of the exponent denominators (ramification).
    pub fn ramification(&self) -> u64 {
        let l = crate::field::rational::denominator_lcm(self.exponents());
        u64::try_from(l).unwrap_or(u64::MAX)
    }
}

pub(crate) fn min_bound(a: Option<&Rational>, b: Option<&Rational>) -> Option<Rational> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y).clone()),
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (None, None) => None,
    }
}

pub(crate) fn fmt_x_power(e: &Rational) -> Option<String> {
    if e.is_zero() {
        None
    } else if *e == Rational::from_integer(1.into()) {
        Some("x".to_string())
    } else {
        Some(format!("x^{}", fmt_exponent(e)))
    }
}

pub(crate) fn join_signed_terms(parts: Vec<String>) -> String {
    let mut out = String::new();
    for (i, t) in parts.into_iter().enumerate() {
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
    out
}

/// `coeff*rest`, with unit coefficients folded into the sign.
pub(crate) fn fmt_product<C: Coefficient>(coeff: &C, rest: &[String]) -> String {
    if rest.is_empty() {
        return coeff.fmt_factor();
    }
    let body = rest.join("*");
    if coeff.is_one() {
        body
    } else if coeff.neg().is_one() {
        format!("-{body}")
    } else {
        format!("{}*{}", coeff.fmt_factor(), body)
    }
}

impl<C: Coefficient> fmt::Display for PuiseuxSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| fmt_product(c, &fmt_x_power(e).into_iter().collect::<Vec<_>>()))
            .collect();
        if parts.is_empty() {
            parts.push("0".into());
        }
        let body = join_signed_terms(parts);
        match &self.trunc {
            Some(t) => write!(f, "{body} + o(x^{})", fmt_exponent(t)),
            None => f.write_str(&body),
        }
    }
}
