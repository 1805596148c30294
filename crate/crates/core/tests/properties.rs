mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use qpuiseux::characteristic::{exact_split, CharPolynomial};
use qpuiseux::parser::{parse_polynomial, parse_scalar};
use qpuiseux::polygon::{points_on_line, NewtonPolygon};
use qpuiseux::qdiff::substitute_series;
use qpuiseux::solver::{solve_exact, SolverConfig};
use qpuiseux::{KScalar, MultiIndex, PuiseuxSeries, QMonomialSum, Rational};

use common::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| r(n, d))
}

fn qsum() -> impl Strategy<Value = QMonomialSum> {
    prop::collection::vec((rational(), (-4i64..=4, 1i64..=2)), 0..4)
        .prop_map(|ts| QMonomialSum::from_terms(ts.into_iter().map(|(c, (n, d))| (r(n, d), c))))
}

fn scalar() -> impl Strategy<Value = KScalar> {
    (qsum(), qsum()).prop_map(|(n, d)| {
        let n = KScalar::from_qsum(n);
        match KScalar::from_qsum(d).inv() {
            Ok(dinv) => &n * &dinv,
            Err(_) => n,
        }
    })
}

/// Coefficients for polynomials and series: at most two `q`-monomials.
fn small_scalar() -> impl Strategy<Value = KScalar> {
    prop::collection::vec((rational(), (-3i64..=3, 1i64..=2)), 1..=2)
        .prop_map(|ts| {
            KScalar::from_qsum(QMonomialSum::from_terms(
                ts.into_iter().map(|(c, (n, d))| (r(n, d), c)),
            ))
        })
        .prop_filter("nonzero", |s| !s.is_zero())
}

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(
        (
            (0i64..=6, 1i64..=2),
            prop::collection::vec(0u32..=2, 0..=3),
            small_scalar(),
        ),
        1..=6,
    )
    .prop_map(|ts| {
        Poly::from_terms(ts.into_iter().map(|((n, d), tau, c)| {
            let mut tau = tau;
            while tau.iter().sum::<u32>() > 3 {
                let i = tau.iter().position(|&t| t > 0).unwrap();
                tau[i] -= 1;
            }
            (r(n, d), MultiIndex::new(tau), c)
        }))
    })
}

fn series(trunc: i64) -> impl Strategy<Value = PuiseuxSeries<KScalar>> {
    prop::collection::vec(((1i64..=8, 1i64..=2), small_scalar()), 0..4).prop_map(move |ts| {
        PuiseuxSeries::new(
            ts.into_iter().map(|((n, d), c)| (r(n, d), c)),
            Some(r(trunc, 1)),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn normalization_is_idempotent(a in scalar()) {
        let again = parse_scalar(&a.to_string()).unwrap();
        prop_assert_eq!(again.to_string(), a.to_string());
        prop_assert_eq!(again, a);
    }

    #[test]
    fn evaluation_is_multiplicative(a in scalar(), b in scalar()) {
        let q = Complex64::new(2.0, 0.0);
        if let (Ok(x), Ok(y), Ok(z)) = (a.eval_at_q(q), b.eval_at_q(q), (&a * &b).eval_at_q(q)) {
            prop_assert!((z - x * y).norm() <= 1e-9 * (1.0 + (x * y).norm()));
        }
    }

    #[test]
    fn render_parse_round_trip(p in poly()) {
        prop_assert_eq!(parse_polynomial(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn substitution_is_linear(p in poly(), q in poly(), s in series(6)) {
        let lhs = substitute_series(&p.add(&q), &s, &());
        let rhs = substitute_series(&p, &s, &()).add(&substitute_series(&q, &s, &()));
        prop_assert_eq!(lhs.terms(), rhs.terms());
    }

    #[test]
    fn substitution_matches_naive_expansion(p in poly(), s in series(6)) {
        let exact = s.with_trunc(None);
        let got = substitute_series(&p, &exact, &());
        let want = residual(&p, &sparse_of(&exact));
        prop_assert_eq!(sparse_of(&got), want);
    }

    #[test]
    fn shift_substitute_round_trip(
        p in poly(),
        c in small_scalar(),
        (mn, md) in (1i64..=4, 1i64..=2),
        s in series(5),
    ) {
        let mu = r(mn, md);
        let s = PuiseuxSeries::new(
            s.terms().iter().filter(|(e, _)| *e > mu).cloned(),
            s.trunc().cloned(),
        );
        let shifted = p.shift_substitute(&c, &mu, &(), None);
        let lhs = substitute_series(&shifted, &s.with_trunc(None), &());
        let full = s.with_trunc(None).add(&PuiseuxSeries::monomial(c, mu, None));
        let rhs = substitute_series(&p, &full, &());
        prop_assert_eq!(lhs.terms(), rhs.terms());
    }

    #[test]
    fn shift_at_q_one_is_identity(s in series(8), j in 0usize..3, x in 0.1f64..0.9) {
        let one = Complex64::new(1.0, 0.0);
        let eval = |t: &PuiseuxSeries<KScalar>| -> Option<Complex64> {
            t.terms().iter().try_fold(Complex64::new(0.0, 0.0), |acc, (e, c)| {
                let v = c.eval_at_q(one).ok()?;
                Some(acc + v * x.powf(qpuiseux::field::rational::to_f64(e)))
            })
        };
        if let (Some(a), Some(b)) = (eval(&s), eval(&s.apply_shift(j, &()))) {
            prop_assert!((a - b).norm() <= 1e-9 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn points_on_line_share_the_support_value(p in poly(), (n, d) in (1i64..=20, 1i64..=4)) {
        let mu = r(n, d);
        let on = points_on_line(&p, &mu);
        prop_assert!(!on.is_empty());
        let omega = support(&p, &mu);
        for k in on {
            prop_assert_eq!(&k.xexp + &mu * Rational::from_integer(k.height().into()), omega.clone());
        }
    }

    #[test]
    fn between_coslopes_one_height(p in poly()) {
        let np = NewtonPolygon::build(&p).unwrap();
        let mut mus: Vec<Rational> = np.edges().iter().map(|e| e.coslope.clone()).collect();
        mus.sort();
        for w in mus.windows(2) {
            if w[0] > r(0, 1) && w[0] < w[1] {
                let mid = (&w[0] + &w[1]) / r(2, 1);
                let heights: std::collections::BTreeSet<u32> =
                    points_on_line(&p, &mid).iter().map(|k| k.height()).collect();
                prop_assert_eq!(heights.len(), 1);
            }
        }
    }

    #[test]
    fn exact_roots_are_roots(p in poly(), (n, d) in (1i64..=6, 1i64..=2)) {
        let phi = CharPolynomial::build(&p, &r(n, d), &());
        for (root, _) in exact_split(&phi).roots {
            prop_assert!(phi.eval(&root).is_zero(), "{} at {}", phi, root);
        }
    }

    #[test]
    fn non_coslope_has_no_nonzero_roots(p in poly(), (n, d) in (1i64..=30, 7i64..=11)) {
        let mu = r(n, d);
        let np = NewtonPolygon::build(&p).unwrap();
        if np.edges().iter().all(|e| e.coslope != mu) {
            let phi = CharPolynomial::build(&p, &mu, &());
            prop_assert!(!phi.has_nonzero_roots());
        }
    }

    #[test]
    fn solver_residual_and_monotonicity(p in poly()) {
        let mut cfg = SolverConfig::new(r(1, 1));
        cfg.max_branches = 8;
        cfg.max_steps_before_pivot = 12;
        let Ok(out) = solve_exact(&p, &cfg) else { return Ok(()); };
        for b in &out.branches {
            let exps: Vec<&Rational> = b.series.exponents().collect();
            prop_assert!(exps.windows(2).all(|w| w[0] < w[1]));
            if matches!(b.status, qpuiseux::solver::BranchStatus::ExactZero
                | qpuiseux::solver::BranchStatus::Truncated)
            {
                let res = residual(&p, &sparse_of(&b.series));
                if let Some(v) = valuation(&res) {
                    prop_assert!(v > r(1, 1), "{} for {}: valuation {}", b.series, p, v);
                }
            }
        }
    }
}

#[test]
fn parser_survives_garbage() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let alphabet: Vec<char> = "0123456789qxy()+-*/^= \n.#".chars().collect();
    for _ in 0..2000 {
        let n = rng.gen_range(0..200);
        let s: String = (0..n)
            .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
            .collect();
        let _ = parse_polynomial(&s);
    }
    let big = "(".repeat(40_000) + &")".repeat(24_000);
    assert!(parse_polynomial(&big).is_err());
    let long = vec!["x"; 16_000].join("+");
    assert!(parse_polynomial(&long).is_ok());
}
