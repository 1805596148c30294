//! Characteristic polynomials `Φ_μ(c)` and their nonzero roots.
//!
//! Substituting `c·x^μ` into a term `a·x^α·∏(σʲy)^{τⱼ}` gives
//! `a·q^{μ·w(τ)}·c^{|τ|}·x^{α+|τ|μ}`; collecting the terms on the supporting
//! line `α + |τ|μ = ω(μ)` yields `Φ_μ(c) = Σ a·q^{μ·w(τ)}·c^{|τ|}`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::field::rational::{exact_root, Rational};
use crate::field::{Approx, Coefficient, KScalar};
use crate::polygon::support_value;
use crate::qdiff::{fmt_product, join_signed_terms, QDiffPolynomial};
use crate::roots::{horner, polynomial_roots};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharError {
    #[error("no exact representation for the roots of {0}; supply a numeric q")]
    ExactRootsUnavailable(String),
    #[error("numeric root finding needs a q value with |q| not in {{0, 1}}")]
    InvalidQ,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharPolynomial<C> {
    coeffs: BTreeMap<u32, C>,
    mu: Rational,
}

impl<C: Coefficient> CharPolynomial<C> {
    pub fn build(p: &QDiffPolynomial<C>, mu: &Rational, ctx: &C::Context) -> Self {
        let mut coeffs: BTreeMap<u32, C> = BTreeMap::new();
        if let Some(omega) = support_value(p, mu) {
            for (k, a) in p.terms() {
                let h = k.height();
                if &k.xexp + mu * Rational::from_integer(h.into()) != omega {
                    continue;
                }
                let w = Rational::from_integer(k.mi.weight().into());
                let v = a.mul(&C::qpow(ctx, &(mu * w)));
                let slot = coeffs.entry(h).or_insert_with(C::zero);
                *slot = slot.add(&v);
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        Self {
            coeffs,
            mu: mu.clone(),
        }
    }

    pub fn from_coeffs(coeffs: BTreeMap<u32, C>, mu: Rational) -> Self {
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Self { coeffs, mu }
    }

    pub fn mu(&self) -> &Rational {
        &self.mu
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, C> {
        &self.coeffs
    }

    pub fn coeff(&self, h: u32) -> C {
        self.coeffs.get(&h).cloned().unwrap_or_else(C::zero)
    }

    pub fn degree(&self) -> u32 {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    pub fn lowest_degree(&self) -> u32 {
        self.coeffs.keys().next().copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Whether a nonzero root can exist, i.e. two distinct degrees occur.
    pub fn has_nonzero_roots(&self) -> bool {
        self.coeffs.len() >= 2
    }

    pub fn eval(&self, c: &C) -> C {
        let mut acc = C::zero();
        let mut prev = self.degree();
        for (&h, a) in self.coeffs.iter().rev() {
            acc = acc.mul(&c.pow(prev - h)).add(a);
            prev = h;
        }
        acc.mul(&c.pow(prev))
    }

    /// Dense coefficients of `Φ(c)/c^k`, `k` the lowest degree.
    fn stripped_dense(&self) -> Vec<C> {
        let low = self.lowest_degree();
        let mut dense = vec![C::zero(); (self.degree() - low) as usize + 1];
        for (&h, a) in &self.coeffs {
            dense[(h - low) as usize] = a.clone();
        }
        dense
    }
}

impl<C: Coefficient> fmt::Display for CharPolynomial<C> {
    /// E.g. `(q - 1)*c - 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let parts = self
            .coeffs
            .iter()
            .rev()
            .map(|(&h, a)| {
                let var = match h {
                    0 => vec![],
                    1 => vec!["c".to_string()],
                    _ => vec![format!("c^{h}")],
                };
                fmt_product(a, &var)
            })
            .collect();
        f.write_str(&join_signed_terms(parts))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootMode {
    Exact,
    Numeric,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RootValue {
    Exact(KScalar),
    Numeric(Complex64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootCandidate {
    pub value: RootValue,
    pub multiplicity: u32,
}

impl RootCandidate {
    pub fn is_exact(&self) -> bool {
        matches!(self.value, RootValue::Exact(_))
    }
}

/// Exact roots found for `Φ`, plus the factor whose roots have no exact
/// representation here.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSplit {
    pub roots: Vec<(KScalar, u32)>,
    /// Dense coefficients (ascending degree) of the unresolved factor; a
    /// constant when every root was found.
    pub unresolved: Vec<KScalar>,
}

impl ExactSplit {
    pub fn unresolved_degree(&self) -> usize {
        self.unresolved.len().saturating_sub(1)
    }
}

/// Finds the nonzero roots of `Φ` that are expressible in the coefficient
/// field: linear factors, real roots of binomials `A·c^m + B` with `−B/A` a
/// `q`-monomial whose rational part has an exact `m`-th root, quadratics
/// with a perfect-square monomial discriminant, and rational roots of
/// `q`-free polynomials. Roots are sorted by their canonical text.
pub fn exact_split(phi: &CharPolynomial<KScalar>) -> ExactSplit {
    let mut f = phi.stripped_dense();
    let mut roots: Vec<(KScalar, u32)> = Vec::new();
    loop {
        if f.len() <= 1 {
            break;
        }
        let mut progressed = false;
        for r in candidate_roots(&f) {
            let mut mult = 0;
            while f.len() > 1 {
                let (quot, rem) = synthetic_division(&f, &r);
                if !rem.is_zero() {
                    break;
                }
                f = quot;
                mult += 1;
            }
            if mult > 0 {
                progressed = true;
                match roots.iter_mut().find(|(v, _)| *v == r) {
                    Some((_, m)) => *m += mult,
                    None => roots.push((r, mult)),
                }
            }
        }
        if !progressed {
            break;
        }
    }
    roots.sort_by(|a, b| a.0.canonical_cmp(&b.0));
    ExactSplit {
        roots,
        unresolved: f,
    }
}

/// Nonzero roots of `Φ`.
///
/// In exact mode the unresolved factor, if any, is solved numerically at
/// `q_value`; without a `q_value` that is an error. Numeric mode evaluates
/// the coefficients at `q_value` and returns numeric roots only.
pub fn nonzero_roots(
    phi: &CharPolynomial<KScalar>,
    mode: RootMode,
    q_value: Option<Complex64>,
) -> Result<Vec<RootCandidate>, CharError> {
    match mode {
        RootMode::Numeric => {
            let q = valid_q(q_value)?;
            let dense = phi
                .stripped_dense()
                .iter()
                .map(|c| c.eval_at_q(q))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| CharError::InvalidQ)?;
            Ok(numeric_candidates(&dense))
        }
        RootMode::Exact => {
            let split = exact_split(phi);
            let mut out: Vec<RootCandidate> = split
                .roots
                .iter()
                .map(|(v, m)| RootCandidate {
                    value: RootValue::Exact(v.clone()),
                    multiplicity: *m,
                })
                .collect();
            if split.unresolved_degree() > 0 {
                let Some(q) = q_value else {
                    return Err(CharError::ExactRootsUnavailable(phi.to_string()));
                };
                let q = valid_q(Some(q))?;
                let dense = split
                    .unresolved
                    .iter()
                    .map(|c| c.eval_at_q(q))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| CharError::InvalidQ)?;
                out.extend(numeric_candidates(&dense));
            }
            Ok(out)
        }
    }
}

/// Nonzero roots of a characteristic polynomial with numeric coefficients.
pub fn approx_roots(phi: &CharPolynomial<Approx>) -> Vec<(Approx, u32)> {
    let dense: Vec<Complex64> = phi.stripped_dense().iter().map(|c| c.value).collect();
    polynomial_roots(&dense)
        .into_iter()
        .filter(|(r, _)| r.norm() > 0.0)
        .map(|(r, m)| (Approx::new(snap_axes(r)), m))
        .collect()
}

/// Zeroes a component that is round-off next to the other one.
fn snap_axes(z: Complex64) -> Complex64 {
    let tiny = 1e-14 * z.norm();
    Complex64::new(
        if z.re.abs() <= tiny { 0.0 } else { z.re },
        if z.im.abs() <= tiny { 0.0 } else { z.im },
    )
}

/// `|Φ(r)| / max |coefficient|` at a numeric `q`.
pub fn relative_residual(dense: &[Complex64], r: Complex64) -> f64 {
    let scale = dense.iter().map(|c| c.norm()).fold(0.0, f64::max);
    horner(dense, r).0.norm() / scale
}

fn valid_q(q: Option<Complex64>) -> Result<Complex64, CharError> {
    match q {
        Some(q) if q.norm() > 0.0 && (q.norm() - 1.0).abs() > 1e-12 => Ok(q),
        _ => Err(CharError::InvalidQ),
    }
}

fn numeric_candidates(dense: &[Complex64]) -> Vec<RootCandidate> {
    polynomial_roots(dense)
        .into_iter()
        .filter(|(r, _)| r.norm() > 0.0)
        .map(|(r, m)| RootCandidate {
            value: RootValue::Numeric(r),
            multiplicity: m,
        })
        .collect()
}

/// `f(c) = (c − r)·quot + rem` for dense ascending coefficients.
fn synthetic_division(f: &[KScalar], r: &KScalar) -> (Vec<KScalar>, KScalar) {
    let n = f.len() - 1;
    let mut quot = vec![KScalar::zero(); n];
    let mut carry = KScalar::zero();
    for k in (0..=n).rev() {
        let v = &f[k] + &(&carry * r);
        if k == 0 {
            return (quot, v);
        }
        quot[k - 1] = v.clone();
        carry = v;
    }
    unreachable!()
}

fn candidate_roots(f: &[KScalar]) -> Vec<KScalar> {
    let deg = f.len() - 1;
    let lead = &f[deg];
    if deg == 1 {
        return vec![(-&f[0]).div(lead).expect("nonzero leading coefficient")];
    }
    let mut out = Vec::new();
    let middle_zero = f[1..deg].iter().all(|c| c.is_zero());
    if middle_zero && !f[0].is_zero() {
        let target = (-&f[0]).div(lead).expect("nonzero leading coefficient");
        out.extend(real_monomial_roots(&target, deg as u32));
    }
    if deg == 2 {
        out.extend(quadratic_roots(&f[0], &f[1], &f[2]));
    }
    if out.is_empty() {
        out.extend(rational_roots(f));
    }
    out
}

/// Real `m`-th roots of `r·q^e` that stay in the field.
fn real_monomial_roots(target: &KScalar, m: u32) -> Vec<KScalar> {
    let Some((r, e)) = target.as_monomial() else {
        return Vec::new();
    };
    let qexp = e / Rational::from_integer(m.into());
    let Some(base) = exact_root(&r.abs(), m) else {
        return Vec::new();
    };
    if r.is_negative() {
        if m % 2 == 1 {
            return vec![KScalar::monomial(-base, qexp)];
        }
        return Vec::new();
    }
    let pos = KScalar::monomial(base.clone(), qexp.clone());
    if m.is_multiple_of(2) {
        vec![pos, KScalar::monomial(-base, qexp)]
    } else {
        vec![pos]
    }
}

fn quadratic_roots(c0: &KScalar, c1: &KScalar, c2: &KScalar) -> Vec<KScalar> {
    let four = KScalar::from_int(4);
    let disc = &(c1 * c1) - &(&four * &(c2 * c0));
    let two_a = &KScalar::from_int(2) * c2;
    let neg_b = -c1;
    if disc.is_zero() {
        return vec![neg_b.div(&two_a).expect("nonzero leading coefficient")];
    }
    let roots = real_monomial_roots(&disc, 2);
    roots
        .iter()
        .map(|s| {
            (&neg_b + s)
                .div(&two_a)
                .expect("nonzero leading coefficient")
        })
        .collect()
}

/// Rational root test for polynomials whose coefficients are plain
/// rationals; skipped when the integer coefficients are too large to factor
/// by trial division.
fn rational_roots(f: &[KScalar]) -> Vec<KScalar> {
    let Some(rats) = f
        .iter()
        .map(|c| c.as_rational())
        .collect::<Option<Vec<_>>>()
    else {
        return Vec::new();
    };
    let l = rats.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<BigInt> = rats
        .iter()
        .map(|r| (r * Rational::from_integer(l.clone())).to_integer())
        .collect();
    let Some(low) = ints.iter().find(|c| !c.is_zero()) else {
        return Vec::new();
    };
    let high = ints.last().expect("nonempty");
    let (Some(ps), Some(qs)) = (divisors(low), divisors(high)) else {
        return Vec::new();
    };
    let mut out: Vec<KScalar> = Vec::new();
    for p in &ps {
        for q in &qs {
            for sign in [1i64, -1] {
                let cand = Rational::new(BigInt::from(sign * *p as i64), BigInt::from(*q));
                let k = KScalar::from_rational(cand);
                if !out.contains(&k) && synthetic_division(f, &k).1.is_zero() {
                    out.push(k);
                }
            }
        }
    }
    out
}

fn divisors(n: &BigInt) -> Option<Vec<u64>> {
    let n = n.abs().to_u64()?;
    if n == 0 || n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rational::{int, rat};

    type P = QDiffPolynomial<KScalar>;

    fn y(j: usize) -> P {
        P::shifted_y(j)
    }

    fn x(e: i64) -> P {
        P::x_monomial(KScalar::one(), int(e))
    }

    fn q() -> KScalar {
        KScalar::q()
    }

    fn exact_values(phi: &CharPolynomial<KScalar>) -> Vec<(String, u32)> {
        nonzero_roots(phi, RootMode::Exact, None)
            .unwrap()
            .into_iter()
            .map(|r| match r.value {
                RootValue::Exact(v) => (v.to_string(), r.multiplicity),
                RootValue::Numeric(_) => panic!("expected exact roots"),
            })
            .collect()
    }

    #[test]
    fn first_order_linear() {
        let p = y(1).sub(&y(0)).sub(&x(1));
        let phi = CharPolynomial::build(&p, &int(1), &());
        assert_eq!(phi.to_string(), "(q - 1)*c - 1");
        assert_eq!(exact_values(&phi), vec![("1/(q - 1)".to_string(), 1)]);
    }

    #[test]
    fn quadratic_binomial() {
        let p = y(0).mul(&y(1)).sub(&x(1));
        let phi = CharPolynomial::build(&p, &rat(1, 2), &());
        assert_eq!(phi.to_string(), "q^(1/2)*c^2 - 1");
        assert_eq!(
            exact_values(&phi),
            vec![("-q^(-1/4)".to_string(), 1), ("q^(-1/4)".to_string(), 1)]
        );
        for (v, _) in exact_split(&phi).roots {
            assert!(phi.eval(&v).is_zero());
        }
    }

    #[test]
    fn unshifted_linear() {
        let p = y(0).sub(&x(1));
        let phi = CharPolynomial::build(&p, &int(1), &());
        assert_eq!(phi.to_string(), "c - 1");
    }

    #[test]
    fn pure_power_has_no_nonzero_root() {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(2, KScalar::one());
        let phi = CharPolynomial::from_coeffs(coeffs, int(1));
        assert!(exact_values(&phi).is_empty());
        assert!(!phi.has_nonzero_roots());
    }

    #[test]
    fn off_edge_direction_is_single_height() {
        let p = y(1).sub(&y(0)).sub(&x(1));
        let phi = CharPolynomial::build(&p, &int(2), &());
        assert!(!phi.has_nonzero_roots());
        assert!(exact_values(&phi).is_empty());
    }

    #[test]
    fn multiplicity_by_repeated_division() {
        // (c - 2)^2 (c + 1) = c^3 - 3c^2 + 4
        let mut coeffs = BTreeMap::new();
        for (h, v) in [(3, 1), (2, -3), (0, 4)] {
            coeffs.insert(h, KScalar::from_int(v));
        }
        let phi = CharPolynomial::from_coeffs(coeffs, int(1));
        assert_eq!(
            exact_values(&phi),
            vec![("-1".to_string(), 1), ("2".to_string(), 2)]
        );
    }

    #[test]
    fn double_root_of_quadratic() {
        // (q·c - 1)^2
        let mut coeffs = BTreeMap::new();
        coeffs.insert(2, &q() * &q());
        coeffs.insert(1, &KScalar::from_int(-2) * &q());
        coeffs.insert(0, KScalar::one());
        let phi = CharPolynomial::from_coeffs(coeffs, int(1));
        assert_eq!(exact_values(&phi), vec![("q^(-1)".to_string(), 2)]);
    }

    #[test]
    fn rational_polynomial_roots() {
        // 2c^3 - 3c^2 - 3c + 2 = (c - 2)(2c - 1)(c + 1)
        let mut coeffs = BTreeMap::new();
        for (h, v) in [(3, 2), (2, -3), (1, -3), (0, 2)] {
            coeffs.insert(h, KScalar::from_int(v));
        }
        let phi = CharPolynomial::from_coeffs(coeffs, int(1));
        assert_eq!(
            exact_values(&phi),
            vec![
                ("-1".to_string(), 1),
                ("1/2".to_string(), 1),
                ("2".to_string(), 1)
            ]
        );
    }

    #[test]
    fn cubic_binomial_needs_numeric_fallback() {
        // c^3 - 8: exact real root 2, complex pair unresolved
        let mut coeffs = BTreeMap::new();
        coeffs.insert(3, KScalar::one());
        coeffs.insert(0, KScalar::from_int(-8));
        let phi = CharPolynomial::from_coeffs(coeffs, int(1));
        let split = exact_split(&phi);
        assert_eq!(split.roots, vec![(KScalar::from_int(2), 1)]);
        assert_eq!(split.unresolved_degree(), 2);
        assert!(matches!(
            nonzero_roots(&phi, RootMode::Exact, None),
            Err(CharError::ExactRootsUnavailable(_))
        ));
        let all = nonzero_roots(&phi, RootMode::Exact, Some(Complex64::new(2.0, 0.0))).unwrap();
        assert_eq!(all.len(), 3);
        assert_eq!(all.iter().filter(|r| r.is_exact()).count(), 1);
        for r in &all[1..] {
            let RootValue::Numeric(z) = r.value else {
                panic!()
            };
            assert!((z.powi(3) - Complex64::new(8.0, 0.0)).norm() < 1e-9 * 8.0);
        }
    }

    #[test]
    fn numeric_mode_roots_satisfy_phi() {
        let p = y(0).mul(&y(1)).sub(&x(1));
        let phi = CharPolynomial::build(&p, &rat(1, 2), &());
        let qv = Complex64::new(2.0, 0.0);
        let roots = nonzero_roots(&phi, RootMode::Numeric, Some(qv)).unwrap();
        assert_eq!(roots.len(), 2);
        let dense: Vec<Complex64> = phi
            .stripped_dense()
            .iter()
            .map(|c| c.eval_at_q(qv).unwrap())
            .collect();
        for r in roots {
            let RootValue::Numeric(z) = r.value else {
                panic!()
            };
            assert!(relative_residual(&dense, z) <= 1e-9);
        }
        assert_eq!(
            nonzero_roots(&phi, RootMode::Numeric, Some(Complex64::new(1.0, 0.0))),
            Err(CharError::InvalidQ)
        );
    }
}
