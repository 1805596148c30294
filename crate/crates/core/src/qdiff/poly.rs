use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};

use super::multi_index::MultiIndex;
use super::series::{fmt_product, fmt_x_power, join_signed_terms};
use crate::field::rational::Rational;
use crate::field::{Approx, Coefficient, FieldError, KScalar};

/// Identifies a monomial `x^α·∏(σʲy)^{τⱼ}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermKey {
    pub xexp: Rational,
    pub mi: MultiIndex,
}

impl TermKey {
    pub fn new(xexp: Rational, mi: MultiIndex) -> Self {
        Self { xexp, mi }
    }

    pub fn height(&self) -> u32 {
        self.mi.height()
    }
}

/// Sparse q-difference polynomial `P(x, y, σy, …, σⁿy) = Σ a·x^α·∏(σʲy)^{τⱼ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct QDiffPolynomial<C> {
    terms: BTreeMap<TermKey, C>,
}

impl<C: Coefficient> Default for QDiffPolynomial<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coefficient> QDiffPolynomial<C> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Rational, MultiIndex, C)>,
    {
        let mut p = Self::zero();
        for (a, mi, c) in terms {
            p.add_term(TermKey::new(a, mi), c);
        }
        p
    }

    /// `c·x^α` (no `y`).
    pub fn x_monomial(c: C, alpha: Rational) -> Self {
        Self::from_terms([(alpha, MultiIndex::constant(), c)])
    }

    /// `σʲy`.
    pub fn shifted_y(j: usize) -> Self {
        Self::from_terms([(Rational::zero(), MultiIndex::shift(j), C::one())])
    }

    pub fn add_term(&mut self, key: TermKey, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(v) => {
                let s = v.add(&c);
                if s.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &TermKey) -> Option<&C> {
        self.terms.get(key)
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

    /// Largest shift `j` with some `τⱼ > 0` (0 when no shift occurs).
    pub fn order(&self) -> usize {
        self.terms
            .keys()
            .filter_map(|k| k.mi.order())
            .max()
            .unwrap_or(0)
    }

    /// Largest total `y`-degree `|τ|`.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|k| k.height()).max().unwrap_or(0)
    }

    pub fn has_y(&self) -> bool {
        self.terms.keys().any(|k| k.height() > 0)
    }

    /// Terms with `|τ| = 0`, i.e. `P(x, 0, …, 0)`.
    pub fn constant_part(&self) -> impl Iterator<Item = (&TermKey, &C)> {
        self.terms.iter().filter(|(k, _)| k.height() == 0)
    }

    pub fn has_constant_part(&self) -> bool {
        self.constant_part().next().is_some()
    }

    pub fn min_xexp(&self) -> Option<&Rational> {
        self.terms.keys().map(|k| &k.xexp).min()
    }

    pub fn max_xexp(&self) -> Option<&Rational> {
        self.terms.keys().map(|k| &k.xexp).max()
    }

    /// `max α − min α` over the terms.
    pub fn alpha_span(&self) -> Rational {
        match (self.min_xexp(), self.max_xexp()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => Rational::zero(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.mul(c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                out.add_term(
                    TermKey::new(&ka.xexp + &kb.xexp, ka.mi.product(&kb.mi)),
                    ca.mul(cb),
                );
            }
        }
        out
    }

    /// Multiplies every term by `x^e`.
    pub fn shift_x(&self, e: &Rational) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (TermKey::new(&k.xexp + e, k.mi.clone()), c.clone()))
                .collect(),
        }
    }

    /// Drops every term with `x`-exponent greater than `bound` (`None` keeps
    /// everything).
    pub fn truncate_x(&self, bound: Option<&Rational>) -> Self {
        self.truncate_x_counted(bound).0
    }

    /// As [`truncate_x`](Self::truncate_x), also returning how many terms were
    /// dropped.
    pub fn truncate_x_counted(&self, bound: Option<&Rational>) -> (Self, usize) {
        let Some(t) = bound else {
            return (self.clone(), 0);
        };
        let terms: BTreeMap<_, _> = self
            .terms
            .iter()
            .filter(|(k, _)| k.xexp <= *t)
            .map(|(k, c)| (k.clone(), c.clone()))
            .collect();
        let dropped = self.terms.len() - terms.len();
        (Self { terms }, dropped)
    }

    /// `∂P/∂(σʲy)`, treating `y, σy, …` as independent variables.
    pub fn partial_derivative(&self, j: usize) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            let t = k.mi.get(j);
            if t == 0 {
                continue;
            }
            let factor = C::from_rational(&Rational::from_integer(t.into()));
            out.add_term(
                TermKey::new(k.xexp.clone(), k.mi.with_entry(j, t - 1)),
                c.mul(&factor),
            );
        }
        out
    }

    /// The polynomial `P(x, c·x^μ + y)`: every `σʲy` is replaced by
    /// `c·q^{jμ}·x^μ + σʲy` and expanded. Terms with `x`-exponent above `limit`
    /// are discarded as they are generated.
    pub fn shift_substitute(
        &self,
        c: &C,
        mu: &Rational,
        ctx: &C::Context,
        limit: Option<&Rational>,
    ) -> Self {
        self.shift_substitute_counted(c, mu, ctx, limit).0
    }

    /// As [`shift_substitute`](Self::shift_substitute), also reporting how
    /// many expanded terms were discarded by `limit`.
    pub fn shift_substitute_counted(
        &self,
        c: &C,
        mu: &Rational,
        ctx: &C::Context,
        limit: Option<&Rational>,
    ) -> (Self, usize) {
        let mut dropped = 0;
        let max_deg = self.degree() as usize;
        let mut c_pows = Vec::with_capacity(max_deg + 1);
        c_pows.push(C::one());
        for i in 1..=max_deg {
            c_pows.push(c_pows[i - 1].mul(c));
        }
        let mut out = Self::zero();
        for (key, a) in &self.terms {
            let tau = key.mi.entries();
            let mut ks = vec![0u32; tau.len()];
            loop {
                let lifted: u32 = ks.iter().sum();
                let xexp = &key.xexp + mu * Rational::from_integer(lifted.into());
                if limit.is_none_or(|t| xexp <= *t) {
                    let mut coeff = a.mul(&c_pows[lifted as usize]);
                    let mut weight = 0u64;
                    for (j, (&t, &k)) in tau.iter().zip(&ks).enumerate() {
                        if k > 0 {
                            coeff = coeff.mul(&C::from_rational(&binomial(t, k)));
                            weight += j as u64 * u64::from(k);
                        }
                    }
                    if weight > 0 {
                        coeff =
                            coeff.mul(&C::qpow(ctx, &(mu * Rational::from_integer(weight.into()))));
                    }
                    let rest = MultiIndex::new(tau.iter().zip(&ks).map(|(t, k)| t - k).collect());
                    out.add_term(TermKey::new(xexp, rest), coeff);
                } else {
                    dropped += 1;
                }
                // odometer over 0 ≤ kⱼ ≤ τⱼ
                let mut j = 0;
                while j < ks.len() {
                    if ks[j] < tau[j] {
                        ks[j] += 1;
                        break;
                    }
                    ks[j] = 0;
                    j += 1;
                }
                if j == ks.len() {
                    break;
                }
            }
        }
        (out, dropped)
    }

    pub fn map_coefficients<D, F>(&self, mut f: F) -> Result<QDiffPolynomial<D>, FieldError>
    where
        D: Coefficient,
        F: FnMut(&C) -> Result<D, FieldError>,
    {
        let mut out = QDiffPolynomial::zero();
        for (k, c) in &self.terms {
            out.add_term(k.clone(), f(c)?);
        }
        Ok(out)
    }
}

impl QDiffPolynomial<KScalar> {
    /// Specializes the formal `q` to a number.
    pub fn to_numeric(&self, q: Complex64) -> Result<QDiffPolynomial<Approx>, FieldError> {
        self.map_coefficients(|c| c.eval_at_q(q).map(Approx::new))
    }
}

fn binomial(n: u32, k: u32) -> Rational {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rational::from_integer(acc)
}

impl<C: Coefficient> fmt::Display for QDiffPolynomial<C> {
    /// Canonical text, e.g. `y1 - y0 - x` for `σy − y − x`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts = self
            .terms
            .iter()
            .map(|(k, c)| {
                let mut factors: Vec<String> = fmt_x_power(&k.xexp).into_iter().collect();
                if k.height() > 0 {
                    factors.push(k.mi.to_string());
                }
                fmt_product(c, &factors)
            })
            .collect();
        f.write_str(&join_signed_terms(parts))
    }
}
