//! Independent oracles and generators shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_bigint::BigInt;
use qpuiseux::parser::parse_polynomial;
use qpuiseux::{KScalar, MultiIndex, QDiffPolynomial, Rational};
use rand::Rng;

pub type Poly = QDiffPolynomial<KScalar>;
/// Sparse series `exponent -> coefficient`, finite.
pub type Sparse = BTreeMap<Rational, KScalar>;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn corpus() -> Vec<(String, Poly)> {
    let text = std::fs::read_to_string(fixture_dir().join("corpus.txt")).expect("corpus");
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| (l.to_string(), parse_polynomial(l).expect("corpus equation")))
        .collect()
}

pub fn r(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn push(acc: &mut Sparse, e: Rational, c: KScalar) {
    let slot = acc.entry(e.clone()).or_insert_with(KScalar::zero);
    *slot = &*slot + &c;
    if slot.is_zero() {
        acc.remove(&e);
    }
}

fn mul(a: &Sparse, b: &Sparse) -> Sparse {
    let mut out = Sparse::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            push(&mut out, ea + eb, ca * cb);
        }
    }
    out
}

/// `σʲs`: `x^e ↦ q^{j·e}·x^e`.
fn shift(s: &Sparse, j: usize) -> Sparse {
    s.iter()
        .map(|(e, c)| {
            let qe = e * Rational::from_integer(BigInt::from(j));
            (e.clone(), c * &KScalar::qpow(&qe))
        })
        .collect()
}

/// `P(s)` by direct expansion, no truncation.
pub fn residual(p: &Poly, s: &Sparse) -> Sparse {
    let mut out = Sparse::new();
    let mut shifted: BTreeMap<usize, Sparse> = BTreeMap::new();
    for (key, a) in p.terms() {
        let mut term = Sparse::new();
        term.insert(key.xexp.clone(), a.clone());
        for (j, &t) in key.mi.entries().iter().enumerate() {
            let sj = shifted.entry(j).or_insert_with(|| shift(s, j)).clone();
            for _ in 0..t {
                term = mul(&term, &sj);
            }
        }
        for (e, c) in term {
            push(&mut out, e, c);
        }
    }
    out
}

pub fn valuation(s: &Sparse) -> Option<Rational> {
    s.keys().next().cloned()
}

pub fn sparse_of(series: &qpuiseux::PuiseuxSeries<KScalar>) -> Sparse {
    series.terms().iter().cloned().collect()
}

/// `min (α + |τ|·μ)` over the terms of `p`.
pub fn support(p: &Poly, mu: &Rational) -> Rational {
    p.terms()
        .map(|(k, _)| &k.xexp + mu * Rational::from_integer(k.height().into()))
        .min()
        .expect("nonzero polynomial")
}

/// Coefficients of the polynomial through `(xs[i], ys[i])`, lowest first.
pub fn interpolate(xs: &[KScalar], ys: &[KScalar]) -> Vec<KScalar> {
    let n = xs.len();
    let mut dd: Vec<KScalar> = ys.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            let num = &dd[i] - &dd[i - 1];
            let den = &xs[i] - &xs[i - level];
            dd[i] = num.div(&den).expect("distinct nodes");
        }
    }
    let mut coeffs = vec![KScalar::zero(); n];
    for i in (0..n).rev() {
        // coeffs ← coeffs·(c − xs[i]) + dd[i]
        let mut next = vec![KScalar::zero(); n];
        for k in 0..n {
            if k + 1 < n {
                next[k + 1] = &next[k + 1] + &coeffs[k];
            }
            next[k] = &next[k] - &(&coeffs[k] * &xs[i]);
        }
        next[0] = &next[0] + &dd[i];
        coeffs = next;
    }
    coeffs
}

pub fn random_rational<R: Rng>(rng: &mut R, max_num: i64, dens: &[i64]) -> Rational {
    let d = dens[rng.gen_range(0..dens.len())];
    r(rng.gen_range(0..=max_num), d)
}

pub fn random_scalar<R: Rng>(rng: &mut R) -> KScalar {
    let n = rng.gen_range(1..=4i64) * if rng.gen_bool(0.5) { 1 } else { -1 };
    match rng.gen_range(0..4) {
        0 => KScalar::from_int(n),
        1 => KScalar::monomial(
            Rational::from_integer(n.into()),
            r(rng.gen_range(-3..=3), 1),
        ),
        2 => &KScalar::qpow(&r(rng.gen_range(1..=3), 1)) - &KScalar::from_int(n),
        _ => KScalar::monomial(r(n, 2), r(rng.gen_range(-2..=2), 2)),
    }
}

pub fn random_multi_index<R: Rng>(rng: &mut R, max_order: usize, max_degree: u32) -> MultiIndex {
    let h = rng.gen_range(0..=max_degree);
    let mut tau = vec![0u32; max_order + 1];
    for _ in 0..h {
        tau[rng.gen_range(0..=max_order)] += 1;
    }
    MultiIndex::new(tau)
}

/// Random `P` with `y`, of order ≤ 2, degree ≤ 3 and at most 6 terms.
pub fn random_poly<R: Rng>(rng: &mut R) -> Poly {
    loop {
        let n = rng.gen_range(1..=6);
        let p = Poly::from_terms((0..n).map(|_| {
            (
                random_rational(rng, 6, &[1, 2]),
                random_multi_index(rng, 2, 3),
                random_scalar(rng),
            )
        }));
        if p.has_y() {
            return p;
        }
    }
}
